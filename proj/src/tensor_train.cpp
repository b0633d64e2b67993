#include "qtt/tensor_train.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "qtt/kernels.hpp"

namespace qtt {

namespace {

using ColMatrix = Eigen::MatrixXd;

// A core with an arbitrary physical dimension, stored as its (left*phys) x right unfolding.
struct Block {
  Index left = 1;
  Index phys = 2;
  Index right = 1;
  RowMatrix m;  // (left*phys) x right

  ConstMatrixMap right_view() const { return {m.data(), left, phys * right}; }
};

std::vector<Block> to_blocks(const TensorTrain& tt) {
  std::vector<Block> out;
  out.reserve(tt.size());
  for (const auto& c : tt.cores()) out.push_back({c.left(), 2, c.right(), RowMatrix(c.left_unfolding())});
  return out;
}

TensorTrain from_blocks(std::vector<Block>&& blocks, std::optional<std::size_t> center) {
  std::vector<Core> cores;
  cores.reserve(blocks.size());
  for (auto& b : blocks) {
    std::vector<double> data(b.m.data(), b.m.data() + b.m.size());
    cores.emplace_back(b.left, b.right, std::move(data));
  }
  return TensorTrain(std::move(cores), center);
}

// Thin QR of the left unfolding of block i, pushing R into block i+1.
void orthogonalize_left(std::vector<Block>& blocks, std::size_t i) {
  Block& b = blocks[i];
  const Index rows = b.m.rows();
  const Index cols = b.m.cols();
  const Index k = std::min(rows, cols);
  Eigen::HouseholderQR<ColMatrix> qr(ColMatrix(b.m));
  ColMatrix q = qr.householderQ() * ColMatrix::Identity(rows, k);
  RowMatrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  b.m = q;
  b.right = k;
  Block& next = blocks[i + 1];
  RowMatrix nr = r * RowMatrix(next.right_view());
  next.left = k;
  next.m = Eigen::Map<RowMatrix>(nr.data(), k * next.phys, next.right);
}

// Thin LQ of the right unfolding of block i, pushing L into block i-1.
void orthogonalize_right(std::vector<Block>& blocks, std::size_t i) {
  Block& b = blocks[i];
  RowMatrix rv = b.right_view();
  const Index rows = rv.rows();
  const Index cols = rv.cols();
  const Index k = std::min(rows, cols);
  Eigen::HouseholderQR<ColMatrix> qr(ColMatrix(rv.transpose()));
  ColMatrix q = qr.householderQ() * ColMatrix::Identity(cols, k);
  RowMatrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  RowMatrix qt = q.transpose();  // k x (phys*right)
  b.left = k;
  b.m = Eigen::Map<RowMatrix>(qt.data(), k * b.phys, b.right);
  Block& prev = blocks[i - 1];
  prev.m = prev.m * r.transpose();
  prev.right = k;
}

bool is_zero(const RowMatrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

std::vector<Block> zero_blocks(std::size_t n, Index phys) {
  std::vector<Block> out(n);
  for (auto& b : out) b = {1, phys, 1, RowMatrix::Zero(phys, 1)};
  return out;
}

// Left-orthogonalize everything, then SVD-truncate from the right. Returns discarded weight.
double svd_sweep(std::vector<Block>& blocks, const TruncationPolicy& policy) {
  const std::size_t n = blocks.size();
  for (std::size_t i = 0; i + 1 < n; ++i) orthogonalize_left(blocks, i);
  const double total = blocks.back().m.squaredNorm();
  if (total == 0.0 || !std::isfinite(total)) {
    if (total == 0.0) blocks = zero_blocks(n, blocks.front().phys);
    return 0.0;
  }
  double discarded = 0.0;
  for (std::size_t i = n - 1; i > 0; --i) {
    Block& b = blocks[i];
    ColMatrix rv = b.right_view();
    Eigen::BDCSVD<ColMatrix> svd(rv, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector s = svd.singularValues();
    const CutDecision cut = choose_cut(s, policy);
    discarded += cut.discarded;
    const Index k = cut.keep;
    RowMatrix vt = svd.matrixV().leftCols(k).transpose();
    b.left = k;
    b.m = Eigen::Map<RowMatrix>(vt.data(), k * b.phys, b.right);
    RowMatrix us = svd.matrixU().leftCols(k) * s.head(k).asDiagonal();
    Block& prev = blocks[i - 1];
    prev.m = prev.m * us;
    prev.right = k;
  }
  return discarded / total;
}

void check_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                               std::to_string(b) + ")");
}

template <typename T>
void put(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  is.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!is) throw std::runtime_error("QTT1: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------- Core

Core::Core(Index left, Index right)
    : left_(left), right_(right), data_(static_cast<std::size_t>(2 * left * right), 0.0) {
  if (left < 1 || right < 1) throw ShapeError("Core: bond dimensions must be positive");
}

Core::Core(Index left, Index right, std::vector<double> data) : left_(left), right_(right), data_(std::move(data)) {
  if (left < 1 || right < 1) throw ShapeError("Core: bond dimensions must be positive");
  if (static_cast<Index>(data_.size()) != 2 * left * right) throw ShapeError("Core: data size mismatch");
}

RowMatrix Core::slice(int s) const {
  RowMatrix m(left_, right_);
  for (Index l = 0; l < left_; ++l)
    for (Index r = 0; r < right_; ++r) m(l, r) = (*this)(l, s, r);
  return m;
}

Core Core::from_left_unfolding(const RowMatrix& m) {
  if (m.rows() % 2 != 0) throw ShapeError("Core: left unfolding needs an even row count");
  return Core(m.rows() / 2, m.cols(), std::vector<double>(m.data(), m.data() + m.size()));
}

Core Core::from_right_unfolding(const RowMatrix& m) {
  if (m.cols() % 2 != 0) throw ShapeError("Core: right unfolding needs an even column count");
  return Core(m.rows(), m.cols() / 2, std::vector<double>(m.data(), m.data() + m.size()));
}

OpCore::OpCore(Index left, Index right)
    : left_(left), right_(right), data_(static_cast<std::size_t>(4 * left * right), 0.0) {
  if (left < 1 || right < 1) throw ShapeError("OpCore: bond dimensions must be positive");
}

// ---------------------------------------------------------------------------- containers

TensorTrain::TensorTrain(std::vector<Core> cores, std::optional<std::size_t> center)
    : cores_(std::move(cores)), center_(center) {
  if (cores_.empty()) throw ShapeError("TensorTrain: at least one site required");
  if (cores_.front().left() != 1 || cores_.back().right() != 1)
    throw ShapeError("TensorTrain: boundary bonds must be one-dimensional");
  for (std::size_t i = 0; i + 1 < cores_.size(); ++i)
    if (cores_[i].right() != cores_[i + 1].left())
      throw ShapeError("TensorTrain: bond mismatch between sites " + std::to_string(i) + " and " +
                       std::to_string(i + 1));
  if (center_ && *center_ >= cores_.size()) throw ShapeError("TensorTrain: canonical center out of range");
}

std::vector<Index> TensorTrain::bond_dims() const {
  std::vector<Index> dims;
  dims.reserve(cores_.size() + 1);
  dims.push_back(1);
  for (const auto& c : cores_) dims.push_back(c.right());
  return dims;
}

Index TensorTrain::max_bond() const {
  Index m = 1;
  for (const auto& c : cores_) m = std::max(m, c.right());
  return m;
}

std::size_t TensorTrain::parameter_count() const {
  std::size_t n = 0;
  for (const auto& c : cores_) n += static_cast<std::size_t>(c.size());
  return n;
}

TensorTrainOperator::TensorTrainOperator(std::vector<OpCore> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw ShapeError("TensorTrainOperator: at least one site required");
  if (cores_.front().left() != 1 || cores_.back().right() != 1)
    throw ShapeError("TensorTrainOperator: boundary bonds must be one-dimensional");
  for (std::size_t i = 0; i + 1 < cores_.size(); ++i)
    if (cores_[i].right() != cores_[i + 1].left())
      throw ShapeError("TensorTrainOperator: bond mismatch at site " + std::to_string(i));
}

std::vector<Index> TensorTrainOperator::bond_dims() const {
  std::vector<Index> dims{1};
  for (const auto& c : cores_) dims.push_back(c.right());
  return dims;
}

Index TensorTrainOperator::max_bond() const {
  Index m = 1;
  for (const auto& c : cores_) m = std::max(m, c.right());
  return m;
}

void TruncationPolicy::validate() const {
  if (max_bond < 1) throw std::invalid_argument("TruncationPolicy: max_bond must be >= 1");
  if (!(rel_tol >= 0.0) || !std::isfinite(rel_tol))
    throw std::invalid_argument("TruncationPolicy: rel_tol must be finite and nonnegative");
}

CutDecision choose_cut(const Vector& s, const TruncationPolicy& policy) {
  const Index n = s.size();
  if (n == 0) return {1, 0.0};
  const double total = s.squaredNorm();
  if (total == 0.0) return {1, 0.0};
  // Smallest k whose tail weight is within rel_tol.
  Index keep = n;
  double tail = 0.0;
  while (keep > 1) {
    const double next = tail + s(keep - 1) * s(keep - 1);
    if (next > policy.rel_tol * total) break;
    tail = next;
    --keep;
  }
  keep = std::min(keep, policy.max_bond);
  double discarded = 0.0;
  for (Index j = keep; j < n; ++j) discarded += s(j) * s(j);
  return {keep, discarded};
}

// ---------------------------------------------------------------------------- gauge

TensorTrain canonicalize(const TensorTrain& tt, std::size_t center) {
  if (center >= tt.size()) throw std::out_of_range("canonicalize: center " + std::to_string(center) + " out of range");
  auto blocks = to_blocks(tt);
  for (std::size_t i = 0; i < center; ++i) orthogonalize_left(blocks, i);
  for (std::size_t i = blocks.size() - 1; i > center; --i) orthogonalize_right(blocks, i);
  if (is_zero(blocks[center].m)) blocks = zero_blocks(blocks.size(), 2);
  return from_blocks(std::move(blocks), center);
}

TruncationResult truncate(const TensorTrain& tt, const TruncationPolicy& policy) {
  policy.validate();
  auto blocks = to_blocks(tt);
  const double discarded = svd_sweep(blocks, policy);
  return {from_blocks(std::move(blocks), 0), discarded};
}

// ---------------------------------------------------------------------------- algebra

double inner(const TensorTrain& a, const TensorTrain& b) {
  check_same_length(a.size(), b.size(), "inner");
  RowMatrix env = RowMatrix::Ones(1, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Core& ca = a.core(i);
    const Core& cb = b.core(i);
    if (ca.left() != env.rows() || cb.left() != env.cols()) throw ShapeError("inner: bond mismatch");
    // (a_l x b_l) * (b_l x 2 b_r) -> a_l x 2 b_r, then contract a_l and s with ca.
    RowMatrix t = env * cb.right_unfolding();  // a_l x (2 b_r)
    RowMatrix next = RowMatrix::Zero(ca.right(), cb.right());
    for (int s = 0; s < 2; ++s) {
      RowMatrix as = ca.slice(s);
      next.noalias() += as.transpose() * t.middleCols(s * cb.right(), cb.right());
    }
    env = std::move(next);
  }
  return env(0, 0);
}

double norm(const TensorTrain& tt) {
  auto blocks = to_blocks(tt);
  for (std::size_t i = 0; i + 1 < blocks.size(); ++i) orthogonalize_left(blocks, i);
  return blocks.back().m.norm();
}

TensorTrain scale(const TensorTrain& tt, double factor) {
  auto cores = tt.cores();
  const std::size_t at = tt.canonical_center().value_or(0);
  for (double& v : cores[at].data()) v *= factor;
  return TensorTrain(std::move(cores), tt.canonical_center());
}

TensorTrain add(const TensorTrain& a, const TensorTrain& b, double coeff_a, double coeff_b) {
  check_same_length(a.size(), b.size(), "add");
  const std::size_t n = a.size();
  std::vector<Core> cores;
  cores.reserve(n);
  if (n == 1) {
    Core c(1, 1);
    for (int s = 0; s < 2; ++s) c(0, s, 0) = coeff_a * a.core(0)(0, s, 0) + coeff_b * b.core(0)(0, s, 0);
    cores.push_back(std::move(c));
    return TensorTrain(std::move(cores));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Core& ca = a.core(i);
    const Core& cb = b.core(i);
    const bool first = i == 0;
    const bool last = i + 1 == n;
    const Index l = first ? 1 : ca.left() + cb.left();
    const Index r = last ? 1 : ca.right() + cb.right();
    Core c(l, r);
    const Index la = first ? 0 : ca.left();
    const Index ra = last ? 0 : ca.right();
    const double fa = first ? coeff_a : 1.0;
    const double fb = first ? coeff_b : 1.0;
    for (int s = 0; s < 2; ++s) {
      for (Index x = 0; x < ca.left(); ++x)
        for (Index y = 0; y < ca.right(); ++y) c(x, s, y) = fa * ca(x, s, y);
      for (Index x = 0; x < cb.left(); ++x)
        for (Index y = 0; y < cb.right(); ++y) c(la + x, s, ra + y) = fb * cb(x, s, y);
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain apply(const TensorTrainOperator& op, const TensorTrain& tt, const TruncationPolicy& policy) {
  check_same_length(op.size(), tt.size(), "apply");
  std::vector<Core> cores;
  cores.reserve(tt.size());
  for (std::size_t i = 0; i < tt.size(); ++i) cores.push_back(kernels::apply_core(op.core(i), tt.core(i)));
  TensorTrain raw(std::move(cores));
  const bool exact = policy.max_bond == TruncationPolicy::exact().max_bond && policy.rel_tol == 0.0;
  if (exact) return raw;
  return truncate(raw, policy).train;
}

double evaluate(const TensorTrain& tt, std::span<const int> bits) {
  check_same_length(bits.size(), tt.size(), "evaluate");
  RowMatrix v = RowMatrix::Ones(1, 1);
  for (std::size_t i = 0; i < tt.size(); ++i) {
    const int s = bits[i];
    if (s != 0 && s != 1) throw std::invalid_argument("evaluate: bits must be 0 or 1");
    const Core& c = tt.core(i);
    RowMatrix next = RowMatrix::Zero(1, c.right());
    for (Index l = 0; l < c.left(); ++l) {
      const double coeff = v(0, l);
      if (coeff == 0.0) continue;
      for (Index r = 0; r < c.right(); ++r) next(0, r) += coeff * c(l, s, r);
    }
    v = std::move(next);
  }
  return v(0, 0);
}

double expectation(const TensorTrain& a, const TensorTrainOperator& op, const TensorTrain& b) {
  check_same_length(a.size(), op.size(), "expectation");
  check_same_length(b.size(), op.size(), "expectation");
  Environment env;
  for (std::size_t i = 0; i < a.size(); ++i) env = kernels::extend_left(env, a.core(i), op.core(i), b.core(i));
  return env(0, 0, 0);
}

// ---------------------------------------------------------------------------- dense

std::size_t dense_cap() {
  if (const char* env = std::getenv("QTT_DENSE_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v < 40) return static_cast<std::size_t>(v);
  }
  return 26;
}

std::vector<double> to_dense(const TensorTrain& tt) {
  if (tt.size() > dense_cap())
    throw std::length_error("to_dense: " + std::to_string(tt.size()) + " sites exceeds dense cap " +
                            std::to_string(dense_cap()));
  RowMatrix acc = RowMatrix::Ones(1, 1);
  for (const auto& c : tt.cores()) {
    RowMatrix next(acc.rows() * 2, c.right());
    const RowMatrix m0 = c.slice(0);
    const RowMatrix m1 = c.slice(1);
    RowMatrix p0 = acc * m0;
    RowMatrix p1 = acc * m1;
    for (Index r = 0; r < acc.rows(); ++r) {
      next.row(2 * r) = p0.row(r);
      next.row(2 * r + 1) = p1.row(r);
    }
    acc = std::move(next);
  }
  return std::vector<double>(acc.data(), acc.data() + acc.size());
}

TensorTrain from_dense(std::span<const double> values, const TruncationPolicy& policy) {
  const std::size_t len = values.size();
  if (len < 2 || !std::has_single_bit(len)) throw std::invalid_argument("from_dense: length must be 2^N, N >= 1");
  const std::size_t n = static_cast<std::size_t>(std::countr_zero(len));
  if (n > dense_cap()) throw std::length_error("from_dense: exceeds dense cap");
  std::vector<Core> cores;
  RowMatrix rest = Eigen::Map<const RowMatrix>(values.data(), 1, static_cast<Index>(len));
  Index left = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Index cols = rest.size() / (left * 2);
    ColMatrix m = Eigen::Map<const RowMatrix>(rest.data(), left * 2, cols);
    Eigen::BDCSVD<ColMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector s = svd.singularValues();
    const Index k = choose_cut(s, policy).keep;
    RowMatrix u = svd.matrixU().leftCols(k);
    cores.emplace_back(left, k, std::vector<double>(u.data(), u.data() + u.size()));
    rest = s.head(k).asDiagonal() * svd.matrixV().leftCols(k).transpose();
    left = k;
  }
  cores.emplace_back(left, 1, std::vector<double>(rest.data(), rest.data() + rest.size()));
  return TensorTrain(std::move(cores), n - 1);
}

RowMatrix to_dense(const TensorTrainOperator& op) {
  const std::size_t n = op.size();
  if (n > 13 || n > dense_cap()) throw std::length_error("to_dense(operator): too many sites");
  // acc[(o * 2^k + i)][w]
  std::vector<double> acc{1.0};
  Index dim = 1;
  Index bond = 1;
  for (const auto& c : op.cores()) {
    const Index nd = dim * 2;
    std::vector<double> next(static_cast<std::size_t>(nd * nd * c.right()), 0.0);
    for (Index o = 0; o < dim; ++o)
      for (Index i = 0; i < dim; ++i)
        for (Index w = 0; w < bond; ++w) {
          const double v = acc[static_cast<std::size_t>((o * dim + i) * bond + w)];
          if (v == 0.0) continue;
          for (int so = 0; so < 2; ++so)
            for (int si = 0; si < 2; ++si)
              for (Index w2 = 0; w2 < c.right(); ++w2) {
                const double x = c(w, so, si, w2);
                if (x == 0.0) continue;
                next[static_cast<std::size_t>(((o * 2 + so) * nd + (i * 2 + si)) * c.right() + w2)] += v * x;
              }
        }
    acc = std::move(next);
    dim = nd;
    bond = c.right();
  }
  return Eigen::Map<RowMatrix>(acc.data(), dim, dim);
}

// ---------------------------------------------------------------------------- builders

TensorTrain product_train(const std::vector<std::vector<double>>& site_vectors) {
  std::vector<Core> cores;
  for (const auto& v : site_vectors) {
    if (v.size() != 2) throw ShapeError("product_train: each site needs two values");
    cores.emplace_back(1, 1, std::vector<double>{v[0], v[1]});
  }
  return TensorTrain(std::move(cores));
}

TensorTrain constant_train(std::size_t sites, double value) {
  std::vector<std::vector<double>> v(sites, {1.0, 1.0});
  v[0] = {value, value};
  return product_train(v);
}

TensorTrain zero_train(std::size_t sites) { return constant_train(sites, 0.0); }

TensorTrain random_train(std::size_t sites, Index bond, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  std::vector<Core> cores;
  Index left = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    Index right = 1;
    if (i + 1 < sites) {
      // Never exceed the exact rank of a 2^(i+1) x 2^(N-i-1) unfolding.
      const std::size_t exponent = std::min<std::size_t>(std::min(i + 1, sites - i - 1), 30);
      right = std::min(bond, Index{1} << exponent);
    }
    Core c(left, right);
    for (double& x : c.data()) x = dist(rng);
    cores.push_back(std::move(c));
    left = right;
  }
  return TensorTrain(std::move(cores));
}

TensorTrainOperator identity_operator(std::size_t sites) {
  std::vector<OpCore> cores;
  for (std::size_t i = 0; i < sites; ++i) {
    OpCore c(1, 1);
    c(0, 0, 0, 0) = 1.0;
    c(0, 1, 1, 0) = 1.0;
    cores.push_back(std::move(c));
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator random_operator(std::size_t sites, Index bond, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  std::vector<OpCore> cores;
  Index left = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    const Index right = i + 1 == sites ? 1 : bond;
    OpCore c(left, right);
    for (double& x : c.data()) x = dist(rng);
    cores.push_back(std::move(c));
    left = right;
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator scale(const TensorTrainOperator& op, double factor) {
  auto cores = op.cores();
  for (double& v : cores.front().data()) v *= factor;
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator add(const TensorTrainOperator& a, const TensorTrainOperator& b, double coeff_a, double coeff_b) {
  check_same_length(a.size(), b.size(), "add(operator)");
  const std::size_t n = a.size();
  std::vector<OpCore> cores;
  for (std::size_t i = 0; i < n; ++i) {
    const OpCore& ca = a.core(i);
    const OpCore& cb = b.core(i);
    const bool first = i == 0;
    const bool last = i + 1 == n;
    const Index l = first ? 1 : ca.left() + cb.left();
    const Index r = last ? 1 : ca.right() + cb.right();
    OpCore c(l, r);
    const Index la = first ? 0 : ca.left();
    const Index ra = last ? 0 : ca.right();
    const double fa = first ? coeff_a : 1.0;
    const double fb = first ? coeff_b : 1.0;
    for (int o = 0; o < 2; ++o)
      for (int in = 0; in < 2; ++in) {
        for (Index x = 0; x < ca.left(); ++x)
          for (Index y = 0; y < ca.right(); ++y) c(x, o, in, y) += fa * ca(x, o, in, y);
        for (Index x = 0; x < cb.left(); ++x)
          for (Index y = 0; y < cb.right(); ++y) c(la + x, o, in, ra + y) += fb * cb(x, o, in, y);
      }
    cores.push_back(std::move(c));
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator compose(const TensorTrainOperator& a, const TensorTrainOperator& b) {
  check_same_length(a.size(), b.size(), "compose");
  std::vector<OpCore> cores;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const OpCore& ca = a.core(i);
    const OpCore& cb = b.core(i);
    OpCore c(ca.left() * cb.left(), ca.right() * cb.right());
    for (Index wa = 0; wa < ca.left(); ++wa)
      for (Index wb = 0; wb < cb.left(); ++wb)
        for (int o = 0; o < 2; ++o)
          for (int in = 0; in < 2; ++in)
            for (Index va = 0; va < ca.right(); ++va)
              for (Index vb = 0; vb < cb.right(); ++vb) {
                double sum = 0.0;
                for (int m = 0; m < 2; ++m) sum += ca(wa, o, m, va) * cb(wb, m, in, vb);
                c(wa * cb.left() + wb, o, in, va * cb.right() + vb) = sum;
              }
    cores.push_back(std::move(c));
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator compress(const TensorTrainOperator& op, double rel_tol) {
  std::vector<Block> blocks;
  for (const auto& c : op.cores()) {
    RowMatrix m = Eigen::Map<const RowMatrix>(c.data().data(), c.left() * 4, c.right());
    blocks.push_back({c.left(), 4, c.right(), std::move(m)});
  }
  TruncationPolicy policy;
  policy.rel_tol = rel_tol;
  svd_sweep(blocks, policy);
  std::vector<OpCore> cores;
  for (auto& b : blocks) {
    OpCore c(b.left, b.right);
    std::copy(b.m.data(), b.m.data() + b.m.size(), c.data().begin());
    cores.push_back(std::move(c));
  }
  return TensorTrainOperator(std::move(cores));
}

// ---------------------------------------------------------------------------- QTT1 format

void write_binary(std::ostream& os, const TensorTrain& tt) {
  os.write("QTT1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(tt.size()));
  for (Index d : tt.bond_dims()) put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
  for (const auto& c : tt.cores())
    for (double v : c.data()) put<double>(os, v);
  if (!os) throw std::runtime_error("QTT1: write failed");
}

TensorTrain read_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "QTT1") throw std::runtime_error("QTT1: bad magic");
  const auto n = get<std::uint32_t>(is);
  if (n == 0) throw std::runtime_error("QTT1: empty train");
  std::vector<Index> dims(n + 1);
  for (auto& d : dims) d = get<std::uint32_t>(is);
  std::vector<Core> cores;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<double> data(static_cast<std::size_t>(2 * dims[i] * dims[i + 1]));
    for (double& v : data) v = get<double>(is);
    cores.emplace_back(dims[i], dims[i + 1], std::move(data));
  }
  return TensorTrain(std::move(cores));
}

void save(const std::string& path, const TensorTrain& tt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_binary(os, tt);
}

TensorTrain load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_binary(is);
}

}  // namespace qtt
