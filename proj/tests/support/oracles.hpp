#pragma once

// Plain dense reference implementations used to check the train algorithms.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Vec random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = g(rng);
  return v;
}

inline Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

// (S f)_a = f_(a + k), out-of-range values are zero unless periodic.
inline Mat shift(std::size_t n, long k, bool periodic) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const long len = static_cast<long>(n);
  for (long a = 0; a < len; ++a) {
    long b = a + k;
    if (periodic) b = ((b % len) + len) % len;
    if (b >= 0 && b < len) m(a, b) = 1.0;
  }
  return m;
}

// Second difference / h^2 with zero ghost values (or wrap-around).
inline Mat laplacian_1d(std::size_t n, double h, bool periodic) {
  return (shift(n, 1, periodic) + shift(n, -1, periodic) - 2.0 * Mat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))) / (h * h);
}

// Kronecker product with the first factor on the most significant bits.
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat eye(std::size_t n) { return Mat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)); }

// Fine -> coarse.
inline Vec restrict_cst(const Vec& f) {
  Vec c(f.size() / 2);
  for (Eigen::Index a = 0; a < c.size(); ++a) c(a) = f(2 * a);
  return c;
}
inline Vec restrict_avg(const Vec& f) {
  Vec c(f.size() / 2);
  for (Eigen::Index a = 0; a < c.size(); ++a) c(a) = 0.5 * (f(2 * a) + f(2 * a + 1));
  return c;
}

// Coarse -> fine; odd points from a weighted stencil of coarse neighbours.
inline Vec prolong_stencil(const Vec& c, const std::vector<std::pair<long, double>>& stencil, bool periodic) {
  const long n = c.size();
  Vec f(2 * n);
  for (long a = 0; a < n; ++a) {
    f(2 * a) = c(a);
    double odd = 0.0;
    for (const auto& [k, w] : stencil) {
      long b = a + k;
      if (periodic) b = ((b % n) + n) % n;
      if (b >= 0 && b < n) odd += w * c(b);
    }
    f(2 * a + 1) = odd;
  }
  return f;
}

}  // namespace oracle
