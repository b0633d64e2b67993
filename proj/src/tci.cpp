#include "qtt/tci.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qtt {

namespace {

using Bits = std::vector<int>;

class Interpolator {
 public:
  Interpolator(const FunctionAdaptor& f, const QuanticsGrid& grid, const TciConfig& cfg)
      : f_(f), grid_(grid), cfg_(cfg), n_(grid.total_bits()) {}

  TciResult run() {
    if (n_ < 2) throw std::invalid_argument("cross_interpolate: need at least two sites");
    if (cfg_.max_bond < 1) throw std::invalid_argument("cross_interpolate: max_bond must be positive");
    const long start_count = f_.evaluations();
    init_pivots();
    std::vector<std::size_t> previous_ranks;
    for (int sweep = 0; sweep < cfg_.max_sweeps; ++sweep) {
      double err = 0.0;
      for (std::size_t b = 0; b + 1 < n_; ++b) err = std::max(err, update(b));
      for (std::size_t b = n_ - 1; b-- > 0;) err = std::max(err, update(b));
      state_.pivot_error = max_abs_ > 0.0 ? err / max_abs_ : 0.0;
      state_.error_history.push_back(state_.pivot_error);
      state_.sweeps = sweep + 1;
      // A small block can be fully resolved at every rank, so the pivot error alone is not enough;
      // ranks must also have stopped growing.
      std::vector<std::size_t> ranks;
      for (const auto& r : rows_) ranks.push_back(r.size());
      const bool settled = ranks == previous_ranks;
      previous_ranks = std::move(ranks);
      if (state_.pivot_error < cfg_.tol && settled) break;
    }
    TciResult res{build_train(), state_};
    res.state.rows = rows_;
    res.state.cols = cols_;
    res.state.max_abs = max_abs_;
    res.state.max_bond = res.train.max_bond();
    res.state.evaluations = f_.evaluations() - start_count;
    return res;
  }

 private:
  // f on every (row ++ col) concatenation, evaluated in parallel.
  RowMatrix evaluate_block(const std::vector<Bits>& rows, const std::vector<Bits>& cols) {
    const Index nr = static_cast<Index>(rows.size()), nc = static_cast<Index>(cols.size());
    RowMatrix out(nr, nc);
    bool bad = false;
    std::vector<double> bad_point;
#pragma omp parallel for schedule(dynamic, 64)
    for (Index k = 0; k < nr * nc; ++k) {
      const Index r = k / nc, c = k % nc;
      Bits bits(rows[static_cast<std::size_t>(r)]);
      const auto& tail = cols[static_cast<std::size_t>(c)];
      bits.insert(bits.end(), tail.begin(), tail.end());
      const auto point = bits_to_point(grid_, bits);
      const double v = f_(point);
      if (!std::isfinite(v)) {
#pragma omp critical
        {
          if (!bad) bad_point = point;
          bad = true;
        }
      }
      out(r, c) = v;
    }
    if (bad) {
      std::ostringstream os;
      os << "cross_interpolate: non-finite function value at (";
      for (std::size_t i = 0; i < bad_point.size(); ++i) os << (i ? ", " : "") << bad_point[i];
      os << ")";
      throw std::domain_error(os.str());
    }
    if (out.size() > 0) max_abs_ = std::max(max_abs_, out.cwiseAbs().maxCoeff());
    return out;
  }

  static std::vector<Bits> append_bit(const std::vector<Bits>& left) {
    std::vector<Bits> out;
    for (const auto& l : left)
      for (int s = 0; s < 2; ++s) {
        out.push_back(l);
        out.back().push_back(s);
      }
    return out;
  }

  static std::vector<Bits> prepend_bit(const std::vector<Bits>& right) {
    std::vector<Bits> out;
    for (int s = 0; s < 2; ++s)
      for (const auto& r : right) {
        Bits b{s};
        b.insert(b.end(), r.begin(), r.end());
        out.push_back(std::move(b));
      }
    return out;
  }

  Bits seed_bits() {
    if (!cfg_.seeds.empty()) return index_to_bits(grid_, cfg_.seeds.front());
    Bits zero(n_, 0);
    const double v0 = f_(bits_to_point(grid_, zero));
    if (!std::isfinite(v0)) throw std::domain_error("cross_interpolate: non-finite function value at the first grid point");
    if (v0 != 0.0) return zero;
    // fixed low-discrepancy scan (golden-ratio sequence over the flat index)
    const double phi = 0.6180339887498949;
    for (int k = 1; k <= 4096; ++k) {
      const double u = std::fmod(k * phi, 1.0);
      Bits b(n_);
      double frac = u;
      for (std::size_t i = 0; i < n_; ++i) {
        frac *= 2.0;
        b[i] = frac >= 1.0 ? 1 : 0;
        frac -= b[i];
      }
      const double v = f_(bits_to_point(grid_, b));
      if (!std::isfinite(v)) continue;
      if (v != 0.0) return b;
    }
    return zero;
  }

  void init_pivots() {
    rows_.assign(n_ - 1, {});
    cols_.assign(n_ - 1, {});
    std::vector<Bits> seeds;
    if (cfg_.seeds.empty()) {
      seeds.push_back(seed_bits());
    } else {
      for (const auto& s : cfg_.seeds) seeds.push_back(index_to_bits(grid_, s));
    }
    for (std::size_t b = 0; b + 1 < n_; ++b)
      for (const auto& s : seeds) {
        Bits r(s.begin(), s.begin() + static_cast<long>(b) + 1), c(s.begin() + static_cast<long>(b) + 1, s.end());
        if (std::find(rows_[b].begin(), rows_[b].end(), r) == rows_[b].end() &&
            std::find(cols_[b].begin(), cols_[b].end(), c) == cols_[b].end()) {
          rows_[b].push_back(r);
          cols_[b].push_back(c);
        }
      }
  }

  std::vector<Bits> left_set(std::size_t b) const { return b == 0 ? std::vector<Bits>{Bits{}} : rows_[b - 1]; }
  std::vector<Bits> right_set(std::size_t b) const { return b + 2 >= n_ ? std::vector<Bits>{Bits{}} : cols_[b + 1]; }

  // Full-pivot cross approximation of the two-site block at bond b; returns the largest rejected pivot.
  double update(std::size_t b) {
    const auto row_keys = append_bit(left_set(b)), col_keys = prepend_bit(right_set(b));
    RowMatrix pi = evaluate_block(row_keys, col_keys);
    RowMatrix res = pi;
    std::vector<Index> pr, pc;
    const Index cap = std::min<Index>({cfg_.max_bond, pi.rows(), pi.cols()});
    double rejected = 0.0;
    const double abs_tol = cfg_.tol * max_abs_;
    while (true) {
      Index i = 0, j = 0;
      const double piv = res.cwiseAbs().maxCoeff(&i, &j);
      if (static_cast<Index>(pr.size()) >= cap || piv <= abs_tol || piv == 0.0) {
        rejected = piv;
        break;
      }
      pr.push_back(i);
      pc.push_back(j);
      const Vector col = res.col(j);
      const Eigen::RowVectorXd row = res.row(i) / res(i, j);
      res.noalias() -= col * row;
    }
    if (pr.empty()) {
      pr.push_back(0);
      pc.push_back(0);
    }
    std::vector<Bits> nr, nc;
    for (Index i : pr) nr.push_back(row_keys[static_cast<std::size_t>(i)]);
    for (Index j : pc) nc.push_back(col_keys[static_cast<std::size_t>(j)]);
    rows_[b] = std::move(nr);
    cols_[b] = std::move(nc);
    return rejected;
  }

  TensorTrain build_train() {
    std::vector<Core> cores;
    for (std::size_t b = 0; b < n_; ++b) {
      const auto left = left_set_for_site(b), right = right_set_for_site(b);
      // T(I_{b-1}, s, J_b) with rows (I, s)
      RowMatrix t = evaluate_block(append_bit(left), right);
      if (b + 1 < n_) {
        const RowMatrix p = evaluate_block(rows_[b], cols_[b]);
        // core = T P^{-1}  <=>  P^T core^T = T^T
        Eigen::FullPivLU<RowMatrix> lu(p.transpose());
        const RowMatrix core = lu.solve(RowMatrix(t.transpose())).transpose();
        cores.push_back(Core::from_left_unfolding(core));
      } else {
        cores.push_back(Core::from_left_unfolding(t));
      }
    }
    return TensorTrain(std::move(cores));
  }

  std::vector<Bits> left_set_for_site(std::size_t b) const { return b == 0 ? std::vector<Bits>{Bits{}} : rows_[b - 1]; }
  std::vector<Bits> right_set_for_site(std::size_t b) const { return b + 1 >= n_ ? std::vector<Bits>{Bits{}} : cols_[b]; }

  const FunctionAdaptor& f_;
  const QuanticsGrid& grid_;
  TciConfig cfg_;
  std::size_t n_;
  std::vector<std::vector<Bits>> rows_, cols_;
  CrossState state_;
  double max_abs_ = 0.0;
};

}  // namespace

TciResult cross_interpolate(const FunctionAdaptor& f, const QuanticsGrid& grid, const TciConfig& cfg) {
  return Interpolator(f, grid, cfg).run();
}

TciResult cross_interpolate(const FunctionAdaptor& f, const QuanticsGrid& grid, Index max_bond, double tol, int max_sweeps) {
  TciConfig cfg;
  cfg.max_bond = max_bond;
  cfg.tol = tol;
  cfg.max_sweeps = max_sweeps;
  return cross_interpolate(f, grid, cfg);
}

std::vector<std::pair<Index, double>> pivot_error_sweep(const FunctionAdaptor& f, const QuanticsGrid& grid,
                                                        const std::vector<Index>& bonds, int max_sweeps) {
  std::vector<std::pair<Index, double>> out;
  for (Index chi : bonds) {
    TciConfig cfg;
    cfg.max_bond = chi;
    cfg.tol = 0.0;
    cfg.max_sweeps = max_sweeps;
    out.emplace_back(chi, cross_interpolate(f, grid, cfg).state.pivot_error);
  }
  return out;
}

}  // namespace qtt
