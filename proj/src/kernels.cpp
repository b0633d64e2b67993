#include "qtt/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace qtt {

TwoSite merge_two_site(const Core& a, const Core& b) {
  if (a.right() != b.left()) throw ShapeError("merge_two_site: bond mismatch");
  TwoSite t(a.left(), b.right());
  MatrixMap out(t.data.data(), 2 * a.left(), 2 * b.right());
  out.noalias() = a.left_unfolding() * b.right_unfolding();
  return t;
}

namespace kernels {

namespace {

struct Entry {
  Index w;
  int out;
  int in;
  Index w2;
  double value;
};

// Nonzero entries of an operator core grouped by right bond index.
std::vector<std::vector<Entry>> entries_by_right(const OpCore& op) {
  std::vector<std::vector<Entry>> groups(static_cast<std::size_t>(op.right()));
  for (Index w = 0; w < op.left(); ++w)
    for (int o = 0; o < 2; ++o)
      for (int i = 0; i < 2; ++i)
        for (Index w2 = 0; w2 < op.right(); ++w2)
          if (const double v = op(w, o, i, w2); v != 0.0) groups[static_cast<std::size_t>(w2)].push_back({w, o, i, w2, v});
  return groups;
}

std::vector<std::vector<Entry>> entries_by_left(const OpCore& op) {
  std::vector<std::vector<Entry>> groups(static_cast<std::size_t>(op.left()));
  for (Index w = 0; w < op.left(); ++w)
    for (int o = 0; o < 2; ++o)
      for (int i = 0; i < 2; ++i)
        for (Index w2 = 0; w2 < op.right(); ++w2)
          if (const double v = op(w, o, i, w2); v != 0.0) groups[static_cast<std::size_t>(w)].push_back({w, o, i, w2, v});
  return groups;
}

inline void axpy(double* y, const double* x, double a, Index n) {
  Eigen::Map<Vector>(y, n).noalias() += a * Eigen::Map<const Vector>(x, n);
}

// Operator cores with many nonzeros (compressed potentials) go through GEMM; sparse ones
// (finite differences, shifts) through per-entry updates.
bool dense_enough(const OpCore& op) {
  const auto d = op.data();
  const auto nnz = std::count_if(d.begin(), d.end(), [](double v) { return v != 0.0; });
  return op.left() * op.right() >= 16 && 4 * nnz >= static_cast<std::ptrdiff_t>(d.size());
}

// Wm[(out w2)][(w in)] = W(w, out, in, w2)
RowMatrix op_matrix(const OpCore& op) {
  RowMatrix m(2 * op.right(), 2 * op.left());
  for (Index w = 0; w < op.left(); ++w)
    for (int o = 0; o < 2; ++o)
      for (int i = 0; i < 2; ++i)
        for (Index w2 = 0; w2 < op.right(); ++w2) m(o * op.right() + w2, w * 2 + i) = op(w, o, i, w2);
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------- parallel

namespace parallel {

Environment extend_left(const Environment& env, const Core& bra, const OpCore& op, const Core& ket) {
  const Index D = env.op, A = env.bra, Ak = env.ket;
  const Index B = bra.right(), Bk = ket.right(), D2 = op.right();
  if (bra.left() != A || ket.left() != Ak || op.left() != D) throw ShapeError("extend_left: bond mismatch");

  // X[(w a)][(t b')] = sum_a' env[(w a)][a'] ket[a'][(t b')]
  RowMatrix x = ConstMatrixMap(env.data.data(), D * A, Ak) * ket.right_unfolding();

  // Y[(a s)][(w2 b')] = sum_{w,t} W(w,s,t,w2) X[(w a)][(t b')]
  RowMatrix y = RowMatrix::Zero(A * 2, D2 * Bk);
  const auto groups = entries_by_right(op);
#pragma omp parallel for schedule(static)
  for (Index w2 = 0; w2 < D2; ++w2) {
    for (const Entry& e : groups[static_cast<std::size_t>(w2)])
      for (Index a = 0; a < A; ++a)
        axpy(&y(a * 2 + e.out, w2 * Bk), &x(e.w * A + a, e.in * Bk), e.value, Bk);
  }

  // Z[b][(w2 b')] = sum_{a s} bra[(a s)][b] Y[(a s)][(w2 b')]
  RowMatrix z = bra.left_unfolding().transpose() * y;

  Environment out(D2, B, Bk);
#pragma omp parallel for schedule(static)
  for (Index w2 = 0; w2 < D2; ++w2) out.slice(w2) = z.middleCols(w2 * Bk, Bk);
  return out;
}

Environment extend_right(const Environment& env, const Core& bra, const OpCore& op, const Core& ket) {
  const Index D2 = env.op, B = env.bra, Bk = env.ket;
  const Index A = bra.left(), Ak = ket.left(), D = op.left();
  if (bra.right() != B || ket.right() != Bk || op.right() != D2) throw ShapeError("extend_right: bond mismatch");

  // envT[b'][(w2 b)] = env(w2, b, b')
  RowMatrix envt(Bk, D2 * B);
  for (Index w2 = 0; w2 < D2; ++w2) envt.middleCols(w2 * B, B) = env.slice(w2).transpose();

  // X[(a' t)][(w2 b)] = sum_b' ket[(a' t)][b'] envT[b'][(w2 b)]
  RowMatrix x = ket.left_unfolding() * envt;

  // Y[(s b)][(w a')] = sum_{w2,t} W(w,s,t,w2) X[(a' t)][(w2 b)]
  RowMatrix y = RowMatrix::Zero(2 * B, D * Ak);
  const auto groups = entries_by_left(op);
#pragma omp parallel for schedule(static)
  for (Index w = 0; w < D; ++w) {
    for (const Entry& e : groups[static_cast<std::size_t>(w)])
      for (Index ap = 0; ap < Ak; ++ap)
        for (Index b = 0; b < B; ++b) y(e.out * B + b, w * Ak + ap) += e.value * x(ap * 2 + e.in, e.w2 * B + b);
  }

  // Z[a][(w a')] = sum_{s b} bra[a][(s b)] Y[(s b)][(w a')]
  RowMatrix z = bra.right_unfolding() * y;

  Environment out(D, A, Ak);
#pragma omp parallel for schedule(static)
  for (Index w = 0; w < D; ++w) out.slice(w) = z.middleCols(w * Ak, Ak);
  return out;
}

TwoSite two_site_matvec(const Environment& left, const OpCore& w1, const OpCore& w2, const Environment& right,
                        const TwoSite& theta) {
  const Index D = left.op, A = left.bra, Ak = left.ket;
  const Index D1 = w1.right(), D2 = w2.right();
  const Index B = right.bra, Bk = right.ket;
  if (theta.left != Ak || theta.right != Bk || w1.left() != D || w2.left() != D1 || right.op != D2)
    throw ShapeError("two_site_matvec: shape mismatch");

  // X[(w a)][(t1 t2 b')]
  RowMatrix x = ConstMatrixMap(left.data.data(), D * A, Ak) * ConstMatrixMap(theta.data.data(), Ak, 4 * Bk);

  RowMatrix z(A * 4, D2 * Bk);
  if (dense_enough(w1) && dense_enough(w2)) {
    // Xq[(w t1)][(a t2 b')], then Y[(s1 w1)][(a t2 b')] = W1m Xq
    RowMatrix xq(2 * D, A * 2 * Bk);
#pragma omp parallel for schedule(static)
    for (Index w = 0; w < D; ++w)
      for (int t1 = 0; t1 < 2; ++t1)
        for (Index a = 0; a < A; ++a)
          std::copy_n(&x(w * A + a, t1 * 2 * Bk), 2 * Bk, &xq(w * 2 + t1, a * 2 * Bk));
    const RowMatrix y = op_matrix(w1) * xq;

    // Yq[(w1 t2)][(a s1 b')], then Z1[(s2 w2)][(a s1 b')] = W2m Yq
    RowMatrix yq(2 * D1, A * 2 * Bk);
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < D1; ++k)
      for (int s1 = 0; s1 < 2; ++s1)
        for (Index a = 0; a < A; ++a)
          for (int t2 = 0; t2 < 2; ++t2)
            std::copy_n(&y(s1 * D1 + k, (a * 2 + t2) * Bk), Bk, &yq(k * 2 + t2, (a * 2 + s1) * Bk));
    const RowMatrix z1 = op_matrix(w2) * yq;

#pragma omp parallel for schedule(static)
    for (Index a = 0; a < A; ++a)
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
          for (Index k2 = 0; k2 < D2; ++k2)
            std::copy_n(&z1(s2 * D2 + k2, (a * 2 + s1) * Bk), Bk, &z(a * 4 + s1 * 2 + s2, k2 * Bk));
  } else {
    // Y[(w1 a)][(s1 t2 b')] = sum_{w,t1} W1(w,s1,t1,w1) X[(w a)][(t1 t2 b')]
    RowMatrix y = RowMatrix::Zero(D1 * A, 4 * Bk);
    const auto g1 = entries_by_right(w1);
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < D1; ++k)
      for (const Entry& e : g1[static_cast<std::size_t>(k)])
        for (Index a = 0; a < A; ++a)
          axpy(&y(k * A + a, e.out * 2 * Bk), &x(e.w * A + a, e.in * 2 * Bk), e.value, 2 * Bk);

    // Z[(a s1 s2)][(w2 b')] = sum_{w1,t2} W2(w1,s2,t2,w2) Y[(w1 a)][(s1 t2 b')]
    z.setZero();
    const auto g2 = entries_by_right(w2);
#pragma omp parallel for schedule(static)
    for (Index a = 0; a < A; ++a)
      for (Index k2 = 0; k2 < D2; ++k2)
        for (const Entry& e : g2[static_cast<std::size_t>(k2)])
          for (int s1 = 0; s1 < 2; ++s1)
            axpy(&z(a * 4 + s1 * 2 + e.out, k2 * Bk), &y(e.w * A + a, (s1 * 2 + e.in) * Bk), e.value, Bk);
  }

  // R'[(w2 b')][b] = right(w2, b, b')
  RowMatrix rt(D2 * Bk, B);
  for (Index k2 = 0; k2 < D2; ++k2) rt.middleRows(k2 * Bk, Bk) = right.slice(k2).transpose();

  TwoSite out(A, B);
  MatrixMap(out.data.data(), 4 * A, B).noalias() = z * rt;
  return out;
}

Core apply_core(const OpCore& op, const Core& core) {
  const Index D = op.left(), D2 = op.right(), A = core.left(), B = core.right();
  Core out(D * A, D2 * B);
#pragma omp parallel for schedule(static)
  for (Index w = 0; w < D; ++w)
    for (int o = 0; o < 2; ++o)
      for (int i = 0; i < 2; ++i)
        for (Index w2 = 0; w2 < D2; ++w2) {
          const double v = op(w, o, i, w2);
          if (v == 0.0) continue;
          for (Index a = 0; a < A; ++a) axpy(&out(w * A + a, o, w2 * B), core.data().data() + (a * 2 + i) * B, v, B);
        }
  return out;
}

}  // namespace parallel

// ---------------------------------------------------------------------------- serial reference

namespace serial {

Environment extend_left(const Environment& env, const Core& bra, const OpCore& op, const Core& ket) {
  Environment out(op.right(), bra.right(), ket.right());
  for (Index w = 0; w < env.op; ++w)
    for (Index a = 0; a < env.bra; ++a)
      for (Index ak = 0; ak < env.ket; ++ak) {
        const double e = env(w, a, ak);
        if (e == 0.0) continue;
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t)
            for (Index w2 = 0; w2 < op.right(); ++w2) {
              const double v = e * op(w, s, t, w2);
              if (v == 0.0) continue;
              for (Index b = 0; b < bra.right(); ++b)
                for (Index bk = 0; bk < ket.right(); ++bk) out(w2, b, bk) += v * bra(a, s, b) * ket(ak, t, bk);
            }
      }
  return out;
}

Environment extend_right(const Environment& env, const Core& bra, const OpCore& op, const Core& ket) {
  Environment out(op.left(), bra.left(), ket.left());
  for (Index w2 = 0; w2 < env.op; ++w2)
    for (Index b = 0; b < env.bra; ++b)
      for (Index bk = 0; bk < env.ket; ++bk) {
        const double e = env(w2, b, bk);
        if (e == 0.0) continue;
        for (Index w = 0; w < op.left(); ++w)
          for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) {
              const double v = e * op(w, s, t, w2);
              if (v == 0.0) continue;
              for (Index a = 0; a < bra.left(); ++a)
                for (Index ak = 0; ak < ket.left(); ++ak) out(w, a, ak) += v * bra(a, s, b) * ket(ak, t, bk);
            }
      }
  return out;
}

TwoSite two_site_matvec(const Environment& left, const OpCore& w1, const OpCore& w2, const Environment& right,
                        const TwoSite& theta) {
  TwoSite out(left.bra, right.bra);
  for (Index w = 0; w < left.op; ++w)
    for (Index k1 = 0; k1 < w1.right(); ++k1)
      for (Index k2 = 0; k2 < w2.right(); ++k2)
        for (int s1 = 0; s1 < 2; ++s1)
          for (int t1 = 0; t1 < 2; ++t1) {
            const double c1 = w1(w, s1, t1, k1);
            if (c1 == 0.0) continue;
            for (int s2 = 0; s2 < 2; ++s2)
              for (int t2 = 0; t2 < 2; ++t2) {
                const double c = c1 * w2(k1, s2, t2, k2);
                if (c == 0.0) continue;
                for (Index a = 0; a < left.bra; ++a)
                  for (Index ak = 0; ak < left.ket; ++ak) {
                    const double l = c * left(w, a, ak);
                    if (l == 0.0) continue;
                    for (Index b = 0; b < right.bra; ++b)
                      for (Index bk = 0; bk < right.ket; ++bk)
                        out(a, s1, s2, b) += l * right(k2, b, bk) * theta(ak, t1, t2, bk);
                  }
              }
          }
  return out;
}

Core apply_core(const OpCore& op, const Core& core) {
  Core out(op.left() * core.left(), op.right() * core.right());
  for (Index w = 0; w < op.left(); ++w)
    for (Index w2 = 0; w2 < op.right(); ++w2)
      for (Index a = 0; a < core.left(); ++a)
        for (Index b = 0; b < core.right(); ++b)
          for (int o = 0; o < 2; ++o) {
            double sum = 0.0;
            for (int i = 0; i < 2; ++i) sum += op(w, o, i, w2) * core(a, i, b);
            out(w * core.left() + a, o, w2 * core.right() + b) = sum;
          }
  return out;
}

}  // namespace serial

// ---------------------------------------------------------------------------- overlaps

Environment overlap_left(const Environment& env, const Core& bra, const Core& ket) {
  if (env.op != 1 || bra.left() != env.bra || ket.left() != env.ket) throw ShapeError("overlap_left: bond mismatch");
  RowMatrix x = env.slice(0) * ket.right_unfolding();  // a x (s d)
  ConstMatrixMap xs(x.data(), env.bra * 2, ket.right());
  Environment out(1, bra.right(), ket.right());
  out.slice(0).noalias() = bra.left_unfolding().transpose() * xs;
  return out;
}

Environment overlap_right(const Environment& env, const Core& bra, const Core& ket) {
  if (env.op != 1 || bra.right() != env.bra || ket.right() != env.ket) throw ShapeError("overlap_right: bond mismatch");
  RowMatrix x = ket.left_unfolding() * env.slice(0).transpose();  // (c s) x b
  ConstMatrixMap xs(x.data(), ket.left(), 2 * env.bra);
  Environment out(1, bra.left(), ket.left());
  out.slice(0).noalias() = bra.right_unfolding() * xs.transpose();
  return out;
}

TwoSite project_two_site(const Environment& left, const Core& k1, const Core& k2, const Environment& right) {
  RowMatrix x = left.slice(0) * k1.right_unfolding();  // a x (s1 d)
  ConstMatrixMap xs(x.data(), left.bra * 2, k1.right());
  RowMatrix y = xs * k2.right_unfolding();  // (a s1) x (s2 e)
  ConstMatrixMap ys(y.data(), left.bra * 4, k2.right());
  TwoSite out(left.bra, right.bra);
  MatrixMap(out.data.data(), left.bra * 4, right.bra).noalias() = ys * right.slice(0).transpose();
  return out;
}

Vector two_site_diagonal(const Environment& left, const OpCore& w1, const OpCore& w2, const Environment& right) {
  const Index A = left.bra, B = right.bra;
  Vector diag = Vector::Zero(4 * A * B);
  for (Index w = 0; w < left.op; ++w)
    for (Index k1 = 0; k1 < w1.right(); ++k1)
      for (Index k2 = 0; k2 < w2.right(); ++k2)
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2) {
            const double c = w1(w, s1, s1, k1) * w2(k1, s2, s2, k2);
            if (c == 0.0) continue;
            for (Index a = 0; a < A; ++a) {
              const double l = c * left(w, a, a);
              if (l == 0.0) continue;
              for (Index b = 0; b < B; ++b) diag(((a * 2 + s1) * 2 + s2) * B + b) += l * right(k2, b, b);
            }
          }
  return diag;
}

}  // namespace kernels
}  // namespace qtt
