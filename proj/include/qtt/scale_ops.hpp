#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qtt/grid.hpp"
#include "qtt/tensor_train.hpp"

namespace qtt {

/// Fine -> coarse: Cst keeps even points (f'_a = f_2a), Avg takes pair means (f'_a = (f_2a + f_2a+1) / 2).
enum class RestrictionKind { Cst, Avg };

struct StencilTerm {
  long offset = 0;
  double weight = 0.0;
};
using Stencil = std::vector<StencilTerm>;

/// Coarse -> fine interpolation. Even fine points always copy the coarse value.
struct ProlongationKind {
  enum class Type { Constant, Linear, HighOrder };
  Type type = Type::Linear;
  Stencil stencil;  // odd-point weights for HighOrder

  static ProlongationKind constant() { return {Type::Constant, {}}; }
  static ProlongationKind linear() { return {Type::Linear, {}}; }
  static ProlongationKind high_order(Stencil s);
  /// Four-point cubic midpoint interpolant (-1, 9, 9, -1) / 16, exact on cubics.
  static ProlongationKind cubic();
  /// The (-1, 4, 4, -1) / 6 stencil; exact on affine data only.
  static ProlongationKind smooth4();
};

/// Behaviour of shifts at the ends of the domain.
enum class EdgeMode { Open, Periodic };

std::string to_string(RestrictionKind kind);
RestrictionKind restriction_from_string(const std::string& name);
std::string to_string(const ProlongationKind& kind);
ProlongationKind prolongation_from_string(const std::string& name);

/// Removes the least significant bit of one dimension.
std::pair<TensorTrain, QuanticsGrid> restrict_dim(const TensorTrain& tt, const QuanticsGrid& grid, int dim,
                                                  RestrictionKind kind);
/// Removes one bit from every dimension (x first, then y, ...).
std::pair<TensorTrain, QuanticsGrid> restrict(const TensorTrain& tt, const QuanticsGrid& grid, RestrictionKind kind);

std::pair<TensorTrain, QuanticsGrid> prolong_dim(const TensorTrain& tt, const QuanticsGrid& grid, int dim,
                                                 const ProlongationKind& kind, const TruncationPolicy& policy,
                                                 EdgeMode edge = EdgeMode::Open);
/// Adds one bit to every dimension (x first, then y, ...).
std::pair<TensorTrain, QuanticsGrid> prolong(const TensorTrain& tt, const QuanticsGrid& grid,
                                             const ProlongationKind& kind, const TruncationPolicy& policy,
                                             const std::vector<EdgeMode>& edges = {});

/// Per-bit tensor of a carry automaton: core(c, out, in, c') with c' the carry coming from less significant bits.
using BitCoreFn = std::function<OpCore(int level)>;

/// MPO acting along one grid dimension (identity elsewhere) built from per-bit carry cores and boundary vectors.
TensorTrainOperator dimension_mpo(const QuanticsGrid& grid, int dim, const BitCoreFn& bit_core,
                                  const std::vector<double>& left_boundary, const std::vector<double>& right_boundary);

/// offset = +1 maps delta_a to delta_(a+1); offset = -1 maps delta_a to delta_(a-1), i.e. (S f)_a = f_(a+1).
TensorTrainOperator shift_mpo(const QuanticsGrid& grid, int dim, int offset, EdgeMode edge = EdgeMode::Open);
TensorTrainOperator shift_mpo(std::size_t sites, int offset, EdgeMode edge = EdgeMode::Open);
/// Carry MPO with left boundary (1/2, 0) and right boundary (1, 1): (I + S_raise) / 2.
TensorTrainOperator averaged_shift_mpo(std::size_t sites);
/// (f_a + f_(a+1)) / 2 along `dim`; the operator behind linear prolongation.
TensorTrainOperator pair_average_mpo(const QuanticsGrid& grid, int dim, EdgeMode edge = EdgeMode::Open);

/// The 5-index addition-with-carry tensor: 1 iff z = x + y + c' (mod 2) and c = floor((x + y + c') / 2).
double magic_tensor(int z, int x, int y, int c, int c_in);

/// Train over `sites` bits equal to the stencil weights at the two's-complement positions of the offsets.
TensorTrain offset_train(std::size_t sites, const Stencil& stencil);
/// MPO of g_a = sum_k w_k f_(a+k) along `dim`, contracted from the magic tensor and the offset train.
TensorTrainOperator multi_shift_mpo(const QuanticsGrid& grid, int dim, const Stencil& stencil,
                                    EdgeMode edge = EdgeMode::Open);
TensorTrainOperator multi_shift_mpo(std::size_t sites, const Stencil& stencil, EdgeMode edge = EdgeMode::Open);

}  // namespace qtt
