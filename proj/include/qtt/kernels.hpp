#pragma once

// Contraction kernels behind the sweeping solvers and MPO application.
//
// Two implementations share one set of signatures:
//   qtt::kernels::parallel  blocked GEMM + OpenMP over independent operator-bond slices
//   qtt::kernels::serial    plain index loops, kept as the reference for tests and benchmarks
// The unqualified qtt::kernels names forward to the parallel versions.
//
// Layouts (all row-major):
//   environment   [w][a][a']   w = operator bond, a = bra bond, a' = ket bond
//   two-site      [a][s1][s2][b]

#include <vector>

#include "qtt/tensor_train.hpp"

namespace qtt {

/// Operator-bond environment block, data[(w * bra + a) * ket + a'].
struct Environment {
  Index op = 1;
  Index bra = 1;
  Index ket = 1;
  std::vector<double> data;

  Environment() : data(1, 1.0) {}
  Environment(Index op_dim, Index bra_dim, Index ket_dim)
      : op(op_dim), bra(bra_dim), ket(ket_dim), data(static_cast<std::size_t>(op_dim * bra_dim * ket_dim), 0.0) {}

  double& operator()(Index w, Index a, Index k) { return data[static_cast<std::size_t>((w * bra + a) * ket + k)]; }
  double operator()(Index w, Index a, Index k) const {
    return data[static_cast<std::size_t>((w * bra + a) * ket + k)];
  }
  MatrixMap slice(Index w) { return {data.data() + w * bra * ket, bra, ket}; }
  ConstMatrixMap slice(Index w) const { return {data.data() + w * bra * ket, bra, ket}; }
};

/// Two-site block theta[a][s1][s2][b].
struct TwoSite {
  Index left = 1;
  Index right = 1;
  std::vector<double> data;

  TwoSite() = default;
  TwoSite(Index l, Index r) : left(l), right(r), data(static_cast<std::size_t>(4 * l * r), 0.0) {}
  double& operator()(Index a, int s1, int s2, Index b) {
    return data[static_cast<std::size_t>(((a * 2 + s1) * 2 + s2) * right + b)];
  }
  double operator()(Index a, int s1, int s2, Index b) const {
    return data[static_cast<std::size_t>(((a * 2 + s1) * 2 + s2) * right + b)];
  }
  Eigen::Map<Vector> vec() { return {data.data(), static_cast<Index>(data.size())}; }
  Eigen::Map<const Vector> vec() const { return {data.data(), static_cast<Index>(data.size())}; }
  /// (2*left) x (2*right) matrix for the SVD split.
  ConstMatrixMap matrix() const { return {data.data(), 2 * left, 2 * right}; }
};

TwoSite merge_two_site(const Core& a, const Core& b);

namespace kernels {

namespace parallel {
Environment extend_left(const Environment& env, const Core& bra, const OpCore& op, const Core& ket);
Environment extend_right(const Environment& env, const Core& bra, const OpCore& op, const Core& ket);
TwoSite two_site_matvec(const Environment& left, const OpCore& w1, const OpCore& w2, const Environment& right,
                        const TwoSite& theta);
Core apply_core(const OpCore& op, const Core& core);
}  // namespace parallel

namespace serial {
Environment extend_left(const Environment& env, const Core& bra, const OpCore& op, const Core& ket);
Environment extend_right(const Environment& env, const Core& bra, const OpCore& op, const Core& ket);
TwoSite two_site_matvec(const Environment& left, const OpCore& w1, const OpCore& w2, const Environment& right,
                        const TwoSite& theta);
Core apply_core(const OpCore& op, const Core& core);
}  // namespace serial

using parallel::apply_core;
using parallel::extend_left;
using parallel::extend_right;
using parallel::two_site_matvec;

/// Overlap environments <bra|ket> without an operator (op bond 1).
Environment overlap_left(const Environment& env, const Core& bra, const Core& ket);
Environment overlap_right(const Environment& env, const Core& bra, const Core& ket);
/// Projection of a two-site window of `ket` onto the bra environments: result[a][s1][s2][b].
TwoSite project_two_site(const Environment& left, const Core& k1, const Core& k2, const Environment& right);

/// Diagonal of the effective two-site operator (used for preconditioning).
Vector two_site_diagonal(const Environment& left, const OpCore& w1, const OpCore& w2, const Environment& right);

}  // namespace kernels
}  // namespace qtt
