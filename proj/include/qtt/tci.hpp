#pragma once

#include <optional>
#include <vector>

#include "qtt/grid.hpp"
#include "qtt/tensor_train.hpp"

namespace qtt {

struct TciConfig {
  Index max_bond = 32;
  /// Stop once the normalized pivot error drops below this value.
  double tol = 1e-12;
  int max_sweeps = 10;
  /// Starting pivots; defaults to the all-zero index (or the first nonzero point of a fixed scan).
  std::vector<MultiIndex> seeds;
};

/// Pivot bookkeeping of a finished interpolation.
struct CrossState {
  /// Per bond b: row pivots (bits of sites 0..b) and column pivots (bits of sites b+1..N-1).
  std::vector<std::vector<std::vector<int>>> rows, cols;
  /// Largest rejected pivot in the last sweep divided by the largest |f| seen.
  double pivot_error = 0.0;
  std::vector<double> error_history;  // per sweep
  double max_abs = 0.0;
  Index max_bond = 0;
  int sweeps = 0;
  long evaluations = 0;
};

struct TciResult {
  TensorTrain train;
  CrossState state;
};

/// 2-site tensor cross interpolation with full pivot search on every two-site fiber.
TciResult cross_interpolate(const FunctionAdaptor& f, const QuanticsGrid& grid, const TciConfig& cfg);
TciResult cross_interpolate(const FunctionAdaptor& f, const QuanticsGrid& grid, Index max_bond, double tol, int max_sweeps);

/// (bond cap, pivot error) for each entry of `bonds`; each run starts from scratch.
std::vector<std::pair<Index, double>> pivot_error_sweep(const FunctionAdaptor& f, const QuanticsGrid& grid,
                                                        const std::vector<Index>& bonds, int max_sweeps = 6);

}  // namespace qtt
