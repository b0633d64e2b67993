#include "qtt/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <random>
#include <stdexcept>

#include "qtt/kernels.hpp"

namespace qtt {

using json = nlohmann::json;
using ColMatrixD = Eigen::MatrixXd;

void SweepConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("sweep tolerance must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  if (min_sweeps < 1 || min_sweeps > max_sweeps) throw std::invalid_argument("min_sweeps must lie in [1, max_sweeps]");
  if (krylov_max_iter < 1 || !(krylov_tol > 0.0)) throw std::invalid_argument("invalid Krylov settings");
  if (!(noise >= 0.0) || noise_sweeps < 0) throw std::invalid_argument("invalid noise settings");
  truncation.validate();
}

// ---------------------------------------------------------------------------- reports

void SolveReport::append(const SolveReport& other) {
  updates.insert(updates.end(), other.updates.begin(), other.updates.end());
  sweeps.insert(sweeps.end(), other.sweeps.begin(), other.sweeps.end());
  levels.insert(levels.end(), other.levels.begin(), other.levels.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  converged = other.converged;
  if (kind.empty()) kind = other.kind;
}

void SolveReport::write_log(std::ostream& os) const {
  for (const auto& u : updates) {
    json j{{"level", u.level}, {"sweep", u.sweep}, {"site", u.site}, {"dir", std::string(1, u.direction)},
           {"value", u.value}, {"bond", u.bond}, {"discarded", u.discarded}, {"iterations", u.iterations},
           {"time", u.time}};
    os << j.dump() << '\n';
  }
}

void SolveReport::write_summary(std::ostream& os) const {
  json j;
  j["kind"] = kind;
  j["converged"] = converged;
  j["total_updates"] = total_updates();
  j["warnings"] = warnings;
  json sw = json::array();
  for (const auto& s : sweeps)
    sw.push_back({{"level", s.level}, {"sweep", s.sweep}, {"sites", s.sites}, {"residual", s.residual},
                  {"energy", s.energy}, {"objective", s.objective}, {"max_bond", s.max_bond},
                  {"parameters", s.parameters}, {"updates", s.updates}, {"local_iterations", s.local_iterations}});
  j["sweeps"] = sw;
  json lv = json::array();
  for (const auto& l : levels)
    lv.push_back({{"level", l.level}, {"sites", l.sites}, {"initial", l.initial}, {"final", l.final},
                  {"sweeps", l.sweeps}, {"updates", l.updates}, {"converged", l.converged},
                  {"max_bond", l.max_bond}, {"parameters", l.parameters}});
  j["levels"] = lv;
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------- Krylov

LanczosResult lanczos_lowest(const std::function<Vector(const Vector&)>& apply, const Vector& start, int max_iter,
                             double tol, int krylov_dim) {
  // Lanczos with thick restart: Rayleigh-Ritz on an explicitly orthonormal Krylov basis,
  // restarted from the lowest few Ritz vectors.
  const Index n = start.size();
  LanczosResult res;
  const Index m_max = std::max<Index>(2, std::min<Index>(krylov_dim, n));
  const Index keep = std::min<Index>(3, m_max - 1);
  ColMatrixD v(n, m_max), av(n, m_max);
  Vector t = start;
  if (t.norm() == 0.0) t = Vector::Ones(n);
  Index k = 0;
  auto push = [&](Vector w) {
    for (int pass = 0; pass < 2; ++pass) w -= v.leftCols(k) * (v.leftCols(k).transpose() * w);
    const double wn = w.norm();
    if (!(wn > 1e-14)) return false;
    v.col(k) = w / wn;
    av.col(k) = apply(v.col(k));
    ++res.iterations;
    ++k;
    return true;
  };
  push(t);
  while (true) {
    RowMatrix h = v.leftCols(k).transpose() * av.leftCols(k);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<RowMatrix> es(h);
    const Vector y = es.eigenvectors().col(0);
    res.value = es.eigenvalues()(0);
    res.vector = v.leftCols(k) * y;
    const Vector r = av.leftCols(k) * y - res.value * res.vector;
    // residual relative to the spectral extent seen so far; rounding sets a floor of about eps ||A||
    const double scale = std::max({1.0, std::abs(res.value), std::abs(es.eigenvalues()(k - 1))});
    if (r.norm() <= tol * scale || k == n) {
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iter) break;
    if (k == m_max) {
      const Index q = std::min(keep, k);
      const RowMatrix yq = es.eigenvectors().leftCols(q);
      const ColMatrixD nv = v.leftCols(k) * yq, nav = av.leftCols(k) * yq;
      v.leftCols(q) = nv;
      av.leftCols(q) = nav;
      k = q;
    }
    if (!push(r)) {
      res.converged = true;
      break;
    }
  }
  res.vector.normalize();
  return res;
}

CgResult conjugate_gradient(const std::function<Vector(const Vector&)>& apply, const Vector& b, const Vector& x0,
                            const Vector& diagonal, int max_iter, double tol) {
  CgResult res;
  res.x = x0;
  const double bn = b.norm();
  if (bn == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }
  auto precond = [&](const Vector& r) {
    if (diagonal.size() != r.size()) return Vector(r);
    Vector z(r.size());
    for (Index i = 0; i < r.size(); ++i) z(i) = diagonal(i) > 0.0 ? r(i) / diagonal(i) : r(i);
    return z;
  };
  Vector r = b - apply(res.x);
  Vector z = precond(r);
  Vector p = z;
  double rz = r.dot(z);
  for (; res.iterations < max_iter; ++res.iterations) {
    if (r.norm() <= tol * bn) {
      res.converged = true;
      return res;
    }
    const Vector ap = apply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double a = rz / pap;
    res.x += a * p;
    r -= a * ap;
    z = precond(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.converged = r.norm() <= tol * bn;
  return res;
}

// ---------------------------------------------------------------------------- sweeping

namespace {

using Clock = std::chrono::steady_clock;
using ColMatrix = Eigen::MatrixXd;

struct Aux {
  const TensorTrain* train = nullptr;
  double weight = 1.0;
  std::vector<Environment> left, right;
};

enum class Mode { Linear, Eigen };

// Largest window diagonalized densely when Lanczos stalls.
constexpr Index kDenseFallback = 2048;

class Sweeper {
 public:
  Sweeper(Mode mode, const TensorTrainOperator& op, const TensorTrain& x0, std::vector<Aux> aux, const SweepConfig& cfg,
          int level)
      : mode_(mode), op_(op), aux_(std::move(aux)), cfg_(cfg), level_(level), start_(Clock::now()), rng_(cfg.noise_seed) {
    const std::size_t n = op.size();
    if (x0.size() != n) throw ShapeError("solver: initial state does not match operator");
    if (n < 2) throw std::invalid_argument("solver: at least two sites are required");
    x_ = canonicalize(x0, 0).release();
    if (mode == Mode::Eigen) {
      const double nx = norm(TensorTrain(x_));
      if (nx == 0.0) throw std::invalid_argument("dmrg: zero initial state");
      for (double& v : x_[0].data()) v /= nx;
    }
    left_.assign(n + 1, Environment());
    right_.assign(n + 1, Environment());
    for (auto& a : aux_) {
      if (a.train->size() != n) throw ShapeError("solver: auxiliary train does not match operator");
      a.left.assign(n + 1, Environment());
      a.right.assign(n + 1, Environment());
    }
    for (std::size_t i = n - 1; i >= 1; --i) update_right(i);
  }

  SolveReport run() {
    SolveReport rep;
    rep.kind = mode_ == Mode::Linear ? "als" : "dmrg";
    const std::size_t n = op_.size();
    double prev = std::numeric_limits<double>::infinity();
    for (int sweep = 1; sweep <= cfg_.max_sweeps; ++sweep) {
      sweep_ = sweep;
      long iters = 0;
      const long before = static_cast<long>(rep.updates.size());
      bool out_of_budget = false;
      for (int half = 0; half < 2 && !out_of_budget; ++half) {
        const bool right = half == 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
          const std::size_t i = right ? k : n - 2 - k;
          auto u = local_update(i, right);
          u.level = level_;
          u.sweep = sweep;
          iters += u.iterations;
          rep.updates.push_back(u);
          if (cfg_.verbosity > 1)
            std::cerr << "  sweep " << sweep << " site " << i << ' ' << u.direction << " value " << u.value << " bond "
                      << u.bond << '\n';
          if (cfg_.max_local_updates > 0 && static_cast<long>(rep.updates.size()) >= cfg_.max_local_updates) {
            out_of_budget = true;
            break;
          }
        }
      }
      SweepRecord s = measure();
      s.level = level_;
      s.sweep = sweep;
      s.updates = static_cast<long>(rep.updates.size()) - before;
      s.local_iterations = iters;
      s.seconds = seconds();
      rep.sweeps.push_back(s);
      if (cfg_.observer) cfg_.observer(s, state());
      if (cfg_.verbosity > 0)
        std::cerr << rep.kind << " level " << level_ << " sweep " << sweep << " residual " << s.residual << " energy "
                  << s.energy << " bond " << s.max_bond << " t " << s.seconds << "s\n";
      const double value = mode_ == Mode::Linear ? s.residual : s.objective;
      const bool done = mode_ == Mode::Linear ? value <= cfg_.tol : std::abs(value - prev) < cfg_.tol;
      prev = value;
      if (done && sweep >= cfg_.min_sweeps && !noisy()) {
        rep.converged = true;
        break;
      }
      if (out_of_budget) break;
    }
    rep.warnings.insert(rep.warnings.end(), warnings_.begin(), warnings_.end());
    return rep;
  }

  TensorTrain state() const { return TensorTrain(x_, 0); }
  double last_energy() const { return last_energy_; }

 private:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  // only penalized searches: a sector lost to truncation cannot come back once the lower states block the rest
  bool noisy() const { return mode_ == Mode::Eigen && !aux_.empty() && cfg_.noise > 0.0 && sweep_ <= cfg_.noise_sweeps; }

  void update_left(std::size_t i) {
    left_[i + 1] = kernels::extend_left(left_[i], x_[i], op_.core(i), x_[i]);
    for (auto& a : aux_) a.left[i + 1] = kernels::overlap_left(a.left[i], x_[i], a.train->core(i));
  }

  void update_right(std::size_t i) {
    right_[i] = kernels::extend_right(right_[i + 1], x_[i], op_.core(i), x_[i]);
    for (auto& a : aux_) a.right[i] = kernels::overlap_right(a.right[i + 1], x_[i], a.train->core(i));
  }

  TwoSite matvec(std::size_t i, const TwoSite& t) const {
    return kernels::two_site_matvec(left_[i], op_.core(i), op_.core(i + 1), right_[i + 2], t);
  }

  RowMatrix dense_local(std::size_t i, Index l, Index r, const std::vector<Vector>& proj) const {
    const Index dim = 4 * l * r;
    RowMatrix a(dim, dim);
    TwoSite e(l, r);
    for (Index j = 0; j < dim; ++j) {
      std::fill(e.data.begin(), e.data.end(), 0.0);
      e.data[static_cast<std::size_t>(j)] = 1.0;
      a.col(j) = matvec(i, e).vec();
    }
    for (std::size_t k = 0; k < proj.size(); ++k) a += aux_[k].weight * proj[k] * proj[k].transpose();
    return 0.5 * (a + a.transpose());
  }

  bool use_direct(Index dim) const {
    switch (cfg_.local_solver) {
      case LocalSolver::Direct: return true;
      case LocalSolver::Krylov: return false;
      case LocalSolver::Auto: break;
    }
    return dim <= cfg_.direct_limit;
  }

  UpdateRecord local_update(std::size_t i, bool move_right) {
    UpdateRecord u;
    u.site = i;
    u.direction = move_right ? 'R' : 'L';
    TwoSite theta = merge_two_site(x_[i], x_[i + 1]);
    const Index l = theta.left, r = theta.right;
    const Index dim = 4 * l * r;
    std::vector<Vector> proj;
    for (const auto& a : aux_)
      proj.push_back(kernels::project_two_site(a.left[i], a.train->core(i), a.train->core(i + 1), a.right[i + 2]).vec());

    if (mode_ == Mode::Linear) {
      const Vector& b = proj.at(0);
      Vector sol;
      if (use_direct(dim)) {
        const RowMatrix a = dense_local(i, l, r, {});
        Eigen::LLT<RowMatrix> llt(a);
        if (llt.info() == Eigen::Success) {
          sol = llt.solve(b);
        } else {
          const double ridge = 1e-12 * std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
          warnings_.push_back("singular local system at site " + std::to_string(i) + "; added ridge " + std::to_string(ridge));
          sol = RowMatrix(a + ridge * RowMatrix::Identity(dim, dim)).ldlt().solve(b);
        }
        u.iterations = 1;
      } else {
        const Vector diag = kernels::two_site_diagonal(left_[i], op_.core(i), op_.core(i + 1), right_[i + 2]);
        auto apply = [&](const Vector& v) {
          TwoSite t(l, r);
          Eigen::Map<Vector>(t.data.data(), dim) = v;
          return Vector(matvec(i, t).vec());
        };
        auto cg = conjugate_gradient(apply, b, theta.vec(), diag, cfg_.krylov_max_iter, cfg_.krylov_tol);
        sol = std::move(cg.x);
        u.iterations = cg.iterations;
      }
      TwoSite t(l, r);
      Eigen::Map<Vector>(t.data.data(), dim) = sol;
      const Vector at = matvec(i, t).vec();
      u.value = 0.5 * sol.dot(at) - sol.dot(b);
      theta = std::move(t);
    } else {
      auto apply = [&](const Vector& v) {
        TwoSite t(l, r);
        Eigen::Map<Vector>(t.data.data(), dim) = v;
        Vector out = matvec(i, t).vec();
        for (std::size_t k = 0; k < proj.size(); ++k) out += aux_[k].weight * proj[k].dot(v) * proj[k];
        return out;
      };
      Vector sol;
      bool done = false;
      if (!use_direct(dim)) {
        auto lz = lanczos_lowest(apply, theta.vec(), cfg_.krylov_max_iter, cfg_.krylov_tol);
        u.iterations = lz.iterations;
        if (lz.converged && std::isfinite(lz.value)) {
          sol = std::move(lz.vector);
          u.value = lz.value;
          done = true;
        } else if (dim > kDenseFallback) {
          // the Ritz vector is still the best state in the Krylov space; a dense solve this size costs minutes
          warnings_.push_back("Lanczos did not converge at site " + std::to_string(i) + "; window too large for dense fallback");
          sol = std::move(lz.vector);
          u.value = lz.value;
          done = true;
        } else {
          warnings_.push_back("Lanczos did not converge at site " + std::to_string(i) + "; used dense local solve");
        }
      }
      if (!done) {
        Eigen::SelfAdjointEigenSolver<RowMatrix> es(dense_local(i, l, r, proj));
        sol = es.eigenvectors().col(0);
        u.value = es.eigenvalues()(0);
        u.iterations += 1;
      }
      last_energy_ = u.value;
      Eigen::Map<Vector>(theta.data.data(), dim) = sol;
      if (noisy()) {
        std::normal_distribution<double> gauss;
        const double amp = cfg_.noise * sol.norm() / std::sqrt(static_cast<double>(dim));
        for (double& v : theta.data) v += amp * gauss(rng_);
      }
    }

    // split
    ColMatrix m = theta.matrix();
    Eigen::BDCSVD<ColMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = svd.singularValues();
    const auto cut = choose_cut(s, cfg_.truncation);
    const Index k = std::max<Index>(1, cut.keep);
    const double total = s.squaredNorm();
    u.discarded = total > 0.0 ? cut.discarded / total : 0.0;
    u.bond = k;
    Vector sk = s.head(k);
    if (mode_ == Mode::Eigen && sk.norm() > 0.0) sk /= sk.norm();
    const RowMatrix U = svd.matrixU().leftCols(k);
    const RowMatrix Vt = svd.matrixV().leftCols(k).transpose();
    if (move_right) {
      x_[i] = Core::from_left_unfolding(U);
      x_[i + 1] = Core::from_right_unfolding(sk.asDiagonal() * Vt);
      update_left(i);
    } else {
      x_[i] = Core::from_left_unfolding(U * sk.asDiagonal());
      x_[i + 1] = Core::from_right_unfolding(Vt);
      update_right(i + 1);
    }
    u.time = seconds();
    return u;
  }

  SweepRecord measure() {
    SweepRecord s;
    const TensorTrain x(x_);
    s.sites = x.size();
    s.max_bond = x.max_bond();
    s.parameters = x.parameter_count();
    if (mode_ == Mode::Linear) {
      const TensorTrain& g = *aux_.at(0).train;
      const double gn = norm(g);
      const double rn = norm(add(apply(op_, x), g, 1.0, -1.0));
      s.residual = gn > 0.0 ? rn / gn : rn;
      s.objective = 0.5 * expectation(x, op_, x) - inner(x, g);
    } else {
      const double nn = inner(x, x);
      s.energy = expectation(x, op_, x) / nn;
      double pen = 0.0;
      for (const auto& a : aux_) {
        const double ov = inner(x, *a.train);
        pen += a.weight * ov * ov / nn;
      }
      s.objective = s.energy + pen;
      last_energy_ = s.energy;
    }
    return s;
  }

  Mode mode_;
  const TensorTrainOperator& op_;
  std::vector<Aux> aux_;
  SweepConfig cfg_;
  int level_;
  Clock::time_point start_;
  std::vector<Core> x_;
  std::vector<Environment> left_, right_;
  std::vector<std::string> warnings_;
  double last_energy_ = 0.0;
  int sweep_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace

LinearResult als_solve(const TensorTrainOperator& op, const TensorTrain& rhs, const TensorTrain& x0,
                       const SweepConfig& cfg, int level) {
  cfg.validate();
  std::vector<Aux> aux(1);
  aux[0].train = &rhs;
  Sweeper sw(Mode::Linear, op, x0, std::move(aux), cfg, level);
  SolveReport rep = sw.run();
  return {sw.state(), std::move(rep)};
}

EigenResult dmrg_solve(const TensorTrainOperator& op, const TensorTrain& x0, const SweepConfig& cfg,
                       const std::vector<Penalty>& penalties, int level) {
  cfg.validate();
  std::vector<TensorTrain> normalized;
  normalized.reserve(penalties.size());
  for (const auto& p : penalties) {
    if (!(p.weight > 0.0)) throw std::invalid_argument("penalty weights must be positive");
    const double n = norm(p.state);
    if (n == 0.0) throw std::invalid_argument("penalty state has zero norm");
    normalized.push_back(scale(p.state, 1.0 / n));
  }
  std::vector<Aux> aux(penalties.size());
  for (std::size_t k = 0; k < penalties.size(); ++k) {
    aux[k].train = &normalized[k];
    aux[k].weight = penalties[k].weight;
  }
  Sweeper sw(Mode::Eigen, op, x0, std::move(aux), cfg, level);
  SolveReport rep = sw.run();
  const double e = rep.sweeps.empty() ? sw.last_energy() : rep.sweeps.back().energy;
  return {e, sw.state(), std::move(rep)};
}

TensorTrain random_initial_state(std::size_t sites, Index bond, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const TensorTrain t = random_train(sites, bond, rng);
  return scale(t, 1.0 / norm(t));
}

// ---------------------------------------------------------------------------- V-cycle

int CycleSchedule::level_count(const QuanticsGrid& fine) const {
  const int n = static_cast<int>(fine.total_bits());
  const int d = fine.dims();
  if (static_mode || n_min == 0 || n_min == n) return 1;
  if (n_min > n) throw std::invalid_argument("schedule: N_min exceeds N_max");
  if ((n - n_min) % d != 0) throw std::invalid_argument("schedule: N_max - N_min must be a multiple of the dimension");
  const int steps = (n - n_min) / d;
  for (int k = 0; k < d; ++k)
    if (fine.bits(k) - steps < 1) throw std::invalid_argument("schedule: N_min leaves a dimension without bits");
  return steps + 1;
}

namespace {

std::vector<QuanticsGrid> level_grids(const QuanticsGrid& fine, int levels) {
  std::vector<QuanticsGrid> grids(static_cast<std::size_t>(levels));
  grids.back() = fine;
  for (int l = levels - 2; l >= 0; --l) {
    QuanticsGrid g = grids[static_cast<std::size_t>(l + 1)];
    for (int d = 0; d < g.dims(); ++d) g = g.with_bits(d, -1);
    grids[static_cast<std::size_t>(l)] = g;
  }
  return grids;
}

SweepConfig level_config(const CycleSchedule& s, int level, int levels) {
  SweepConfig c = (level == levels - 1 && s.final_sweep) ? *s.final_sweep : s.sweep;
  c.noise_seed = s.seed * 1000003ULL + static_cast<std::uint64_t>(level);
  if (!s.level_max_bond.empty()) {
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(level), s.level_max_bond.size() - 1);
    c.truncation.max_bond = s.level_max_bond[idx];
  }
  if (!s.level_rel_tol.empty())
    c.truncation.rel_tol = s.level_rel_tol[std::min<std::size_t>(static_cast<std::size_t>(level), s.level_rel_tol.size() - 1)];
  return c;
}

std::vector<EdgeMode> edges_or_open(const std::vector<EdgeMode>& e, int dims) {
  return e.empty() ? std::vector<EdgeMode>(static_cast<std::size_t>(dims), EdgeMode::Open) : e;
}

// Restricted copies of a fine train on every level grid, finest last.
std::vector<TensorTrain> descend(const TensorTrain& fine, const std::vector<QuanticsGrid>& grids, RestrictionKind kind) {
  std::vector<TensorTrain> out(grids.size());
  out.back() = fine;
  for (std::size_t l = grids.size() - 1; l-- > 0;) out[l] = restrict(out[l + 1], grids[l + 1], kind).first;
  return out;
}

}  // namespace

CycleResult vcycle_linear(const LinearProblem& problem, const CycleSchedule& schedule) {
  const int levels = schedule.level_count(problem.grid);
  const auto grids = level_grids(problem.grid, levels);
  const auto edges = edges_or_open(problem.edges, problem.grid.dims());
  CycleResult result;
  std::vector<TensorTrain> sources;
  if (problem.source) {
    sources = descend(*problem.source, grids, schedule.restriction);
    result.descended.assign(sources.rbegin(), sources.rend());
  }
  result.report.kind = "als";
  TensorTrain x = random_initial_state(grids.front().total_bits(), schedule.init_bond, schedule.seed);
  for (int l = 0; l < levels; ++l) {
    const auto& grid = grids[static_cast<std::size_t>(l)];
    const SweepConfig cfg = level_config(schedule, l, levels);
    if (l > 0) x = prolong(x, grids[static_cast<std::size_t>(l - 1)], schedule.prolongation, cfg.truncation, edges).first;
    const LinearLevel lvl = problem.build(grid, sources.empty() ? nullptr : &sources[static_cast<std::size_t>(l)]);
    const double gn = norm(lvl.rhs);
    const double initial = norm(add(apply(lvl.op, x), lvl.rhs, 1.0, -1.0)) / (gn > 0.0 ? gn : 1.0);
    auto res = als_solve(lvl.op, lvl.rhs, x, cfg, l);
    x = std::move(res.solution);
    LevelRecord rec;
    rec.level = l;
    rec.sites = grid.total_bits();
    rec.initial = initial;
    rec.final = res.report.sweeps.empty() ? initial : res.report.sweeps.back().residual;
    rec.sweeps = static_cast<int>(res.report.sweeps.size());
    rec.updates = res.report.total_updates();
    rec.converged = res.report.converged;
    rec.max_bond = x.max_bond();
    rec.parameters = x.parameter_count();
    rec.seconds = res.report.sweeps.empty() ? 0.0 : res.report.sweeps.back().seconds;
    res.report.levels.push_back(rec);
    result.report.append(res.report);
  }
  result.solution = std::move(x);
  return result;
}

EigenCycleResult vcycle_eigen(const EigenProblem& problem, const CycleSchedule& schedule, int n_states,
                              const std::vector<double>& weights) {
  if (n_states < 1) throw std::invalid_argument("vcycle_eigen: need at least one state");
  const int levels = schedule.level_count(problem.grid);
  const auto grids = level_grids(problem.grid, levels);
  const auto edges = edges_or_open(problem.edges, problem.grid.dims());
  std::vector<TensorTrain> potentials;
  if (problem.potential) potentials = descend(*problem.potential, grids, RestrictionKind::Avg);
  std::vector<TensorTrainOperator> ops;
  for (int l = 0; l < levels; ++l)
    ops.push_back(problem.build(grids[static_cast<std::size_t>(l)], potentials.empty() ? nullptr : &potentials[static_cast<std::size_t>(l)]));

  EigenCycleResult out;
  // penalty states per level, for every converged state
  std::vector<std::vector<TensorTrain>> lower;
  std::vector<double> lower_weight;
  for (int k = 0; k < n_states; ++k) {
    SolveReport report;
    report.kind = "dmrg";
    TensorTrain x = random_initial_state(grids.front().total_bits(), schedule.init_bond, schedule.seed + static_cast<std::uint64_t>(k));
    double energy = 0.0;
    for (int l = 0; l < levels; ++l) {
      const auto& grid = grids[static_cast<std::size_t>(l)];
      SweepConfig cfg = level_config(schedule, l, levels);
      if (l == levels - 1) cfg.min_sweeps = std::max(cfg.min_sweeps, std::min(2, cfg.max_sweeps));
      if (l > 0) {
        x = prolong(x, grids[static_cast<std::size_t>(l - 1)], schedule.prolongation, cfg.truncation, edges).first;
        x = scale(x, 1.0 / norm(x));
      }
      std::vector<Penalty> pens;
      for (std::size_t b = 0; b < lower.size(); ++b) pens.push_back({lower[b][static_cast<std::size_t>(l)], lower_weight[b]});
      const auto& op = ops[static_cast<std::size_t>(l)];
      const double initial = expectation(x, op, x) / inner(x, x);
      auto res = dmrg_solve(op, x, cfg, pens, l);
      x = std::move(res.state);
      energy = res.energy;
      LevelRecord rec;
      rec.level = l;
      rec.sites = grid.total_bits();
      rec.initial = initial;
      rec.final = energy;
      rec.sweeps = static_cast<int>(res.report.sweeps.size());
      rec.updates = res.report.total_updates();
      rec.converged = res.report.converged;
      rec.max_bond = x.max_bond();
      rec.parameters = x.parameter_count();
      rec.seconds = res.report.sweeps.empty() ? 0.0 : res.report.sweeps.back().seconds;
      res.report.levels.push_back(rec);
      report.append(res.report);
    }
    std::vector<TensorTrain> copies = descend(x, grids, schedule.restriction);
    for (auto& c : copies) c = scale(c, 1.0 / norm(c));
    lower.push_back(std::move(copies));
    lower_weight.push_back(static_cast<std::size_t>(k) < weights.size() ? weights[static_cast<std::size_t>(k)]
                                                                       : default_penalty_weight(energy));
    out.states.push_back({energy, std::move(x)});
    out.reports.push_back(std::move(report));
  }
  std::stable_sort(out.states.begin(), out.states.end(), [](const EigenState& a, const EigenState& b) { return a.energy < b.energy; });
  return out;
}

}  // namespace qtt
