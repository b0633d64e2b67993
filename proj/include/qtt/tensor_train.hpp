#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qtt {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

/// Raised when two trains/operators of incompatible length or shape meet.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rank-3 tensor (left, s, right) with s in {0, 1}, stored row-major.
class Core {
 public:
  Core() = default;
  Core(Index left, Index right);
  Core(Index left, Index right, std::vector<double> data);

  Index left() const { return left_; }
  Index right() const { return right_; }
  Index size() const { return 2 * left_ * right_; }

  double& operator()(Index l, int s, Index r) { return data_[static_cast<std::size_t>((l * 2 + s) * right_ + r)]; }
  double operator()(Index l, int s, Index r) const {
    return data_[static_cast<std::size_t>((l * 2 + s) * right_ + r)];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// (2*left) x right view; rows ordered (l, s).
  MatrixMap left_unfolding() { return {data_.data(), 2 * left_, right_}; }
  ConstMatrixMap left_unfolding() const { return {data_.data(), 2 * left_, right_}; }
  /// left x (2*right) view; columns ordered (s, r).
  MatrixMap right_unfolding() { return {data_.data(), left_, 2 * right_}; }
  ConstMatrixMap right_unfolding() const { return {data_.data(), left_, 2 * right_}; }

  /// Matrix M(s) of shape left x right.
  RowMatrix slice(int s) const;

  static Core from_left_unfolding(const RowMatrix& m);
  static Core from_right_unfolding(const RowMatrix& m);

 private:
  Index left_ = 0;
  Index right_ = 0;
  std::vector<double> data_;
};

/// Rank-4 operator tensor (left, out, in, right), stored row-major.
class OpCore {
 public:
  OpCore() = default;
  OpCore(Index left, Index right);

  Index left() const { return left_; }
  Index right() const { return right_; }

  double& operator()(Index l, int out, int in, Index r) {
    return data_[static_cast<std::size_t>(((l * 2 + out) * 2 + in) * right_ + r)];
  }
  double operator()(Index l, int out, int in, Index r) const {
    return data_[static_cast<std::size_t>(((l * 2 + out) * 2 + in) * right_ + r)];
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

 private:
  Index left_ = 0;
  Index right_ = 0;
  std::vector<double> data_;
};

/// Matrix product state over binary sites. Immutable once built.
class TensorTrain {
 public:
  TensorTrain() = default;
  explicit TensorTrain(std::vector<Core> cores, std::optional<std::size_t> center = std::nullopt);

  std::size_t size() const { return cores_.size(); }
  bool empty() const { return cores_.empty(); }
  const Core& core(std::size_t i) const { return cores_.at(i); }
  const std::vector<Core>& cores() const { return cores_; }
  std::vector<Core> release() && { return std::move(cores_); }

  std::optional<std::size_t> canonical_center() const { return center_; }

  /// Bond dimensions chi_0 ... chi_N (chi_0 = chi_N = 1).
  std::vector<Index> bond_dims() const;
  Index max_bond() const;
  /// Number of stored scalars, sum_i chi_{i-1} * 2 * chi_i.
  std::size_t parameter_count() const;

 private:
  std::vector<Core> cores_;
  std::optional<std::size_t> center_;
};

/// Matrix product operator over binary sites.
class TensorTrainOperator {
 public:
  TensorTrainOperator() = default;
  explicit TensorTrainOperator(std::vector<OpCore> cores);

  std::size_t size() const { return cores_.size(); }
  const OpCore& core(std::size_t i) const { return cores_.at(i); }
  const std::vector<OpCore>& cores() const { return cores_; }
  std::vector<Index> bond_dims() const;
  Index max_bond() const;

 private:
  std::vector<OpCore> cores_;
};

struct TruncationPolicy {
  Index max_bond = std::numeric_limits<Index>::max();
  double rel_tol = 0.0;

  void validate() const;
  static TruncationPolicy exact() { return {}; }
};

struct TruncationResult {
  TensorTrain train;
  /// Sum of squared discarded singular values relative to the squared input norm.
  double discarded_weight = 0.0;
};

/// Number of singular values to keep under `policy`, and the discarded squared weight.
struct CutDecision {
  Index keep = 0;
  double discarded = 0.0;
};
CutDecision choose_cut(const Vector& singular_values, const TruncationPolicy& policy);

TensorTrain canonicalize(const TensorTrain& tt, std::size_t center);
TruncationResult truncate(const TensorTrain& tt, const TruncationPolicy& policy);

double inner(const TensorTrain& a, const TensorTrain& b);
/// Euclidean norm computed through an orthogonalization sweep (no cancellation).
double norm(const TensorTrain& tt);
TensorTrain scale(const TensorTrain& tt, double factor);
TensorTrain add(const TensorTrain& a, const TensorTrain& b, double coeff_a = 1.0, double coeff_b = 1.0);
TensorTrain apply(const TensorTrainOperator& op, const TensorTrain& tt,
                  const TruncationPolicy& policy = TruncationPolicy::exact());
double evaluate(const TensorTrain& tt, std::span<const int> bits);
/// <a|op|b>
double expectation(const TensorTrain& a, const TensorTrainOperator& op, const TensorTrain& b);

/// Largest N for which dense conversions are allowed; QTT_DENSE_CAP overrides the default 26.
std::size_t dense_cap();
std::vector<double> to_dense(const TensorTrain& tt);
TensorTrain from_dense(std::span<const double> values, const TruncationPolicy& policy = TruncationPolicy::exact());
/// Dense 2^N x 2^N matrix of the operator, row = output index.
RowMatrix to_dense(const TensorTrainOperator& op);

TensorTrain product_train(const std::vector<std::vector<double>>& site_vectors);
TensorTrain constant_train(std::size_t sites, double value);
TensorTrain zero_train(std::size_t sites);
TensorTrain random_train(std::size_t sites, Index bond, std::mt19937_64& rng);
TensorTrainOperator identity_operator(std::size_t sites);
TensorTrainOperator random_operator(std::size_t sites, Index bond, std::mt19937_64& rng);
TensorTrainOperator scale(const TensorTrainOperator& op, double factor);
/// Direct sum of two operators (bond dims add).
TensorTrainOperator add(const TensorTrainOperator& a, const TensorTrainOperator& b, double coeff_a = 1.0,
                        double coeff_b = 1.0);
/// Operator composition a*b (bond dims multiply).
TensorTrainOperator compose(const TensorTrainOperator& a, const TensorTrainOperator& b);
/// SVD compression of operator bonds (Frobenius-relative per cut).
TensorTrainOperator compress(const TensorTrainOperator& op, double rel_tol);

/// QTT1 binary format.
void write_binary(std::ostream& os, const TensorTrain& tt);
TensorTrain read_binary(std::istream& is);
void save(const std::string& path, const TensorTrain& tt);
TensorTrain load(const std::string& path);

}  // namespace qtt
