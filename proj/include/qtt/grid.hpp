#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qtt/tensor_train.hpp"

namespace qtt {

/// How the bits of the different dimensions are laid out along the train.
enum class BitOrdering {
  Sequential,   ///< x_1..x_R y_1..y_R ...
  Interleaved,  ///< dims inside each group alternate bit by bit, groups follow one another
  ScaleByScale  ///< all dimensions interleaved (accepted, not exercised by the solvers)
};

std::string to_string(BitOrdering ordering);
BitOrdering ordering_from_string(const std::string& name);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
};

/// A single bit slot: dimension and level (level 0 = most significant bit).
struct BitSlot {
  int dim = 0;
  int level = 0;
  bool operator==(const BitSlot&) const = default;
};

/// Uniform half-open grid x_alpha = lo + (hi - lo) * alpha / 2^R per dimension.
class QuanticsGrid {
 public:
  QuanticsGrid() = default;
  QuanticsGrid(std::vector<Interval> domain, std::vector<int> bits, BitOrdering ordering = BitOrdering::Sequential,
               std::vector<std::vector<int>> groups = {});

  /// One-dimensional convenience constructor.
  static QuanticsGrid line(double lo, double hi, int bits);

  int dims() const { return static_cast<int>(domain_.size()); }
  int bits(int dim) const { return bits_.at(static_cast<std::size_t>(dim)); }
  const std::vector<int>& bits() const { return bits_; }
  std::size_t total_bits() const { return layout_.size(); }
  const Interval& domain(int dim) const { return domain_.at(static_cast<std::size_t>(dim)); }
  const std::vector<Interval>& domain() const { return domain_; }
  BitOrdering ordering() const { return ordering_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }

  std::uint64_t points(int dim) const { return std::uint64_t{1} << bits(dim); }
  double spacing(int dim) const;
  double coordinate(int dim, std::uint64_t index) const;
  /// Volume element prod_d spacing(d).
  double cell_volume() const;

  const std::vector<BitSlot>& layout() const { return layout_; }
  const BitSlot& slot(std::size_t site) const { return layout_.at(site); }
  std::size_t site_of(int dim, int level) const;

  /// Grid with bits(dim) changed by `delta`, same domain and ordering.
  QuanticsGrid with_bits(int dim, int delta) const;
  QuanticsGrid with_domain(int dim, Interval iv) const;

  bool operator==(const QuanticsGrid& other) const;

 private:
  void build_layout();

  std::vector<Interval> domain_;
  std::vector<int> bits_;
  BitOrdering ordering_ = BitOrdering::Sequential;
  std::vector<std::vector<int>> groups_;
  std::vector<BitSlot> layout_;
};

using MultiIndex = std::vector<std::uint64_t>;

std::vector<int> index_to_bits(const QuanticsGrid& grid, const MultiIndex& index);
MultiIndex bits_to_index(const QuanticsGrid& grid, std::span<const int> bits);
std::vector<double> bits_to_point(const QuanticsGrid& grid, std::span<const int> bits);
std::vector<double> index_to_point(const QuanticsGrid& grid, const MultiIndex& index);

/// Black-box scalar function of a d-dimensional point with an evaluation counter.
class FunctionAdaptor {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  explicit FunctionAdaptor(Fn fn) : fn_(std::move(fn)), count_(std::make_shared<std::atomic<long>>(0)) {}

  double operator()(std::span<const double> point) const {
    count_->fetch_add(1, std::memory_order_relaxed);
    return fn_(point);
  }
  long evaluations() const { return count_->load(); }
  void reset_count() const { count_->store(0); }

 private:
  Fn fn_;
  std::shared_ptr<std::atomic<long>> count_;
};

TensorTrain build_delta(const QuanticsGrid& grid, const MultiIndex& index);
/// Outer product of one dense table per dimension (each of length 2^bits(d)).
TensorTrain build_separable(const QuanticsGrid& grid, const std::vector<std::vector<double>>& tables);
/// Train over the full grid that depends on dimension `dim` only through `factor` (a train over bits(dim) sites).
TensorTrain embed_dimension(const QuanticsGrid& grid, int dim, const TensorTrain& factor);
/// Dense sampling of f on every grid point; limited by dense_cap().
TensorTrain build_dense(const QuanticsGrid& grid, const FunctionAdaptor& f,
                        const TruncationPolicy& policy = TruncationPolicy::exact());
/// Dense table of all grid values in the train's site order (testing helper wrapper around to_dense).
std::vector<double> sample_dense(const QuanticsGrid& grid, const FunctionAdaptor& f);

/// sin(phase + step * a) over `bits` sites, exact rank 2 (products of plane rotations).
TensorTrain sine_train(int bits, double phase, double step);

/// Element-wise product of two trains on the same sites (bonds multiply).
TensorTrain hadamard(const TensorTrain& a, const TensorTrain& b);

}  // namespace qtt
