// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance --only 6,7 run a subset (criteria sharing a computation should run together)
//
// Exit status is 0 only when every selected criterion passes.

#include <CLI11.hpp>
#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "qtt/problems.hpp"

using namespace qtt;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------- 1. dense equivalence

Verdict dense_equivalence() {
  constexpr int kInstances = 24;
  int passed = 0;
  double worst_linear = 0.0, worst_eigen = 0.0;
  std::string failures;
  for (int k = 0; k < kInstances; ++k) {
    std::mt19937_64 rng(1000 + k);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    const bool linear = k % 2 == 0;
    const int dims = (k / 2) % 2 + 1;
    // eigen instances stay at N <= 10 so the dense eigensolver is cheap
    const int total = linear ? 8 + k % 5 : 6 + k % 5;
    const int b0 = dims == 1 ? total : total / 2;
    const std::vector<int> bits = dims == 1 ? std::vector<int>{b0} : std::vector<int>{b0, total - b0};
    std::vector<Interval> domain;
    for (int b : bits) domain.push_back({0.0, 0.05 * std::ldexp(1.0, b)});  // spacing 0.05 keeps the condition number moderate
    const auto ordering = (k / 4) % 2 ? BitOrdering::Interleaved : BitOrdering::Sequential;
    std::vector<std::vector<int>> groups;
    if (ordering == BitOrdering::Interleaved) groups = dims == 2 ? std::vector<std::vector<int>>{{0, 1}} : std::vector<std::vector<int>>{{0}};
    const QuanticsGrid grid(domain, bits, ordering, groups);
    const std::size_t n = grid.total_bits();

    BoundaryCondition bc;
    for (int d = 0; d < dims; ++d) {
      DimBoundary db;
      db.kind = (k + d) % 3 == 2 ? BoundaryKind::Periodic : BoundaryKind::DirichletZero;
      bc.dims.push_back(db);
    }
    HamiltonianSpec hs;
    for (int d = 0; d < dims; ++d) hs.kinetic.push_back(u(rng));
    const auto t = random_train(n, 2, rng);
    hs.potential = add(hadamard(t, t), constant_train(n, 0.5), 1.0 / std::max(1e-300, norm(hadamard(t, t))) * 50.0, 1.0);
    const auto op = assemble_hamiltonian(hs, grid, bc);
    const oracle::Mat a = to_dense(op);

    SweepConfig cfg;
    cfg.max_sweeps = 40;
    cfg.min_sweeps = 2;
    cfg.tol = 1e-13;
    cfg.truncation.max_bond = 64;
    cfg.truncation.rel_tol = 1e-30;
    cfg.krylov_max_iter = 400;
    cfg.krylov_tol = 1e-13;
    cfg.local_solver = (k / 2) % 3 == 0 ? LocalSolver::Krylov : LocalSolver::Auto;
    const auto x0 = random_initial_state(n, 4, 77 + k);

    double err = 0.0;
    if (linear) {
      const auto rhs = random_train(n, 3, rng);
      const auto res = als_solve(op, rhs, x0, cfg);
      const oracle::Vec want = a.ldlt().solve(oracle::to_vec(to_dense(rhs)));
      err = (oracle::to_vec(to_dense(res.solution)) - want).norm() / want.norm();
      worst_linear = std::max(worst_linear, err);
    } else {
      const auto res = dmrg_solve(op, x0, cfg);
      const Eigen::SelfAdjointEigenSolver<oracle::Mat> es(a, Eigen::EigenvaluesOnly);
      const double want = es.eigenvalues()(0);
      err = std::abs(res.energy - want) / std::abs(want);
      worst_eigen = std::max(worst_eigen, err);
    }
    if (err <= 1e-8) ++passed;
    else failures += fmt(" #%d(%s,N=%zu,err=%.1e)", k, linear ? "als" : "dmrg", n, err);
  }
  return {passed == kInstances, fmt("%d/%d instances within 1e-8 (worst ALS %.1e, worst DMRG %.1e)%s", passed, kInstances,
                                    worst_linear, worst_eigen, failures.c_str())};
}

// ---------------------------------------------------------------------------- 2/3. Poisson benchmark

struct PoissonStudy {
  std::map<std::size_t, TensorTrain> level_solution;  // final state per level, keyed by site count
  std::map<std::size_t, double> error;
  Index chi = 30;
};

const PoissonStudy& poisson_study() {
  static std::optional<PoissonStudy> study;
  if (study) return *study;
  study.emplace();
  const PoissonBenchmark p;
  const auto fine = strip_grid(p, 14, 14);
  CycleSchedule sc;
  sc.n_min = 10;
  sc.sweep.max_sweeps = 12;
  sc.sweep.tol = 1e-5;  // the residual floor of a chi = 30 solution sits near 4e-6
  sc.sweep.truncation.max_bond = study->chi;
  sc.sweep.truncation.rel_tol = 1e-14;
  sc.sweep.observer = [&](const SweepRecord& s, const TensorTrain& x) { study->level_solution[s.sites] = x; };
  const auto res = vcycle_linear(benchmark_problem(p, fine), sc);
  study->level_solution[fine.total_bits()] = res.solution;
  for (std::size_t sites : {20, 24, 28}) {
    const int b = static_cast<int>(sites / 2);
    study->error[sites] = relative_error(study->level_solution.at(sites), benchmark_reference(p, strip_grid(p, b, b)));
  }
  return *study;
}

Verdict poisson_benchmark() {
  const auto& s = poisson_study();
  const double e20 = s.error.at(20), e24 = s.error.at(24), e28 = s.error.at(28);
  const bool ok = e20 <= 1e-2 && e24 < e20 && e28 < e24;
  return {ok, fmt("relative L2 error N=20: %.3e (<= 1e-2), N=24: %.3e, N=28: %.3e (strictly decreasing), chi=%ld", e20, e24, e28,
                  static_cast<long>(s.chi))};
}

Verdict parameter_count() {
  const auto& s = poisson_study();
  bool ok = true;
  std::string rows;
  for (const auto& [sites, x] : s.level_solution) {
    const double bound = 2.0 * s.chi * s.chi * static_cast<double>(sites);
    const auto count = x.parameter_count();
    ok = ok && count <= bound && x.max_bond() <= s.chi;
    if (sites % 4 == 0) rows += fmt(" N=%zu: %zu vs 2^N=%.2e;", sites, count, std::ldexp(1.0, static_cast<int>(sites)));
  }
  return {ok, "QTT parameters <= 2 chi^2 N at every level;" + rows};
}

// ---------------------------------------------------------------------------- 4. charge conservation

Verdict charge_conservation() {
  DensityProblem d;
  d.geometry.half_length = 2.0;
  const auto fine = strip_grid(d.geometry, 10, 10);
  auto [rho, grid] = std::pair{density_train(d, fine).train, fine};
  const double mean = grid_mean(rho);
  double worst = 0.0;
  int levels = 0;
  while (grid.bits(0) > 2) {
    std::tie(rho, grid) = restrict(rho, grid, RestrictionKind::Avg);
    worst = std::max(worst, std::abs(grid_mean(rho) - mean));
    ++levels;
  }
  return {worst <= 1e-14, fmt("Avg restriction over %d levels from N=20: max |mean change| = %.2e (mean %.6e, tol 1e-14)", levels,
                              worst, mean)};
}

// ---------------------------------------------------------------------------- 5. prolongation and shifts

Verdict prolongation_exactness() {
  const int bits = 7;
  const std::size_t n = std::size_t{1} << bits;
  const auto line = QuanticsGrid::line(0.0, 1.0, bits);
  auto sampled = [&](const std::function<double(double)>& f, std::size_t m) {
    std::vector<double> v(m);
    for (std::size_t a = 0; a < m; ++a) v[a] = f(static_cast<double>(a) / static_cast<double>(m));
    return v;
  };
  // affine data, linear prolongation; the last fine point would need a value beyond the grid
  auto affine = [](double x) { return 0.3 - 1.7 * x; };
  double lin_err = 0.0;
  {
    const auto [f, g] = prolong_dim(from_dense(sampled(affine, n)), line, 0, ProlongationKind::linear(), {});
    const auto v = to_dense(f);
    const auto want = sampled(affine, 2 * n);
    for (std::size_t b = 0; b + 1 < 2 * n; ++b) lin_err = std::max(lin_err, std::abs(v[b] - want[b]));
  }
  // two dimensions, interleaved
  {
    const QuanticsGrid g2({{0, 1}, {0, 1}}, {4, 4}, BitOrdering::Interleaved, {{0, 1}});
    const auto tt = build_dense(g2, FunctionAdaptor([](std::span<const double> x) { return 1.0 + 2.0 * x[0] - 0.5 * x[1]; }));
    const auto [f, fg] = prolong(tt, g2, ProlongationKind::linear(), {});
    for (std::uint64_t i = 0; i + 1 < fg.points(0); ++i)
      for (std::uint64_t j = 0; j + 1 < fg.points(1); ++j) {
        const auto bits2 = index_to_bits(fg, {i, j});
        const double want = 1.0 + 2.0 * fg.coordinate(0, i) - 0.5 * fg.coordinate(1, j);
        lin_err = std::max(lin_err, std::abs(evaluate(f, bits2) - want));
      }
  }
  // cubic data, four-point stencil, interior points
  auto cubic = [](double x) { return 1.0 - 2.0 * x + 3.0 * x * x - 0.7 * x * x * x; };
  double cub_err = 0.0;
  {
    const auto [f, g] = prolong_dim(from_dense(sampled(cubic, n)), line, 0, ProlongationKind::cubic(), {});
    const auto v = to_dense(f);
    const auto want = sampled(cubic, 2 * n);
    for (std::size_t b = 2; b + 4 < 2 * n; ++b) cub_err = std::max(cub_err, std::abs(v[b] - want[b]));
  }
  // shift bond dimension
  bool bond_two = true;
  for (int sites : {4, 8, 12, 20})
    for (int off : {1, -1})
      for (auto e : {EdgeMode::Open, EdgeMode::Periodic}) bond_two = bond_two && shift_mpo(sites, off, e).max_bond() == 2;
  for (auto ord : {BitOrdering::Sequential, BitOrdering::Interleaved}) {
    const QuanticsGrid g3({{0, 1}, {0, 1}, {0, 1}}, {4, 4, 4}, ord, ord == BitOrdering::Interleaved ? std::vector<std::vector<int>>{{0, 1, 2}} : std::vector<std::vector<int>>{});
    for (int d = 0; d < 3; ++d) bond_two = bond_two && shift_mpo(g3, d, 1).max_bond() == 2;
  }
  // multi-shift against dense convolution
  double conv_err = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    Stencil s;
    for (long off = -3; off <= 3; ++off)
      if ((off + trial) % 2 == 0 || off == 0) s.push_back({off, w(rng)});
    for (bool periodic : {false, true}) {
      oracle::Mat want = oracle::Mat::Zero(256, 256);
      for (const auto& t : s) want += t.weight * oracle::shift(256, t.offset, periodic);
      const auto op = multi_shift_mpo(8, s, periodic ? EdgeMode::Periodic : EdgeMode::Open);
      conv_err = std::max(conv_err, (to_dense(op) - want).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = lin_err <= 1e-12 && cub_err <= 1e-10 && bond_two && conv_err <= 1e-12;
  return {ok, fmt("linear on affine %.1e (1e-12), cubic stencil on cubic %.1e (1e-10), shift bond 2: %s, multi-shift vs dense %.1e (1e-12)",
                  lin_err, cub_err, bond_two ? "yes" : "no", conv_err)};
}

// ---------------------------------------------------------------------------- 6/7. H2+ 3D

constexpr double kH2Reference = -0.602634;

CycleSchedule h2_schedule(int n_min) {
  CycleSchedule sc;
  sc.n_min = n_min;
  sc.sweep.max_sweeps = 6;
  sc.sweep.min_sweeps = 1;
  sc.sweep.tol = 1e-7;
  sc.sweep.truncation.max_bond = 64;
  sc.sweep.truncation.rel_tol = 1e-14;
  sc.sweep.krylov_max_iter = 60;
  sc.sweep.krylov_tol = 1e-7;
  return sc;
}

struct H2Study {
  QuanticsGrid grid;
  EigenCycleResult result;
};

const H2Study& h2_study() {
  static std::optional<H2Study> study;
  if (study) return *study;
  H2PlusSpec s;
  s.bits = 10;  // N = 30
  study.emplace();
  study->grid = h2_grid_3d(s);
  const auto pot = h2_potential_3d(s, study->grid);
  study->result = vcycle_eigen(h2_problem_3d(s, study->grid, pot.train), h2_schedule(12), 2);
  return *study;
}

Verdict h2_ground_state() {
  const auto& s = h2_study();
  const double e = s.result.states.front().energy;
  const double dev = std::abs(e - kH2Reference);
  return {dev <= 5e-3, fmt("N=12->30 step 3, box [-25,25]^3, chi=64: E0 = %.6f, |E0 - (%.6f)| = %.2f mHa (tol 5 mHa)", e,
                           kH2Reference, 1e3 * dev)};
}

Verdict h2_excited_state() {
  const auto& s = h2_study();
  const auto& psi0 = s.result.states[0].state;
  const auto& psi1 = s.result.states[1].state;
  const double p1 = parity_overlap(psi1, s.grid, {0, 1, 2});
  const double gerade_weight = 0.5 * (1.0 + p1);
  const double overlap = std::abs(inner(psi0, psi1)) / (norm(psi0) * norm(psi1));
  return {gerade_weight <= 1e-4 && overlap <= 1e-6,
          fmt("E1 = %.6f, <P> = %.8f (gerade weight %.1e <= 1e-4), |<psi0|psi1>| = %.1e (<= 1e-6)", s.result.states[1].energy, p1,
              gerade_weight, overlap)};
}

// ---------------------------------------------------------------------------- 8. dynamic vs static

struct Robustness {
  bool monotone = true;
  bool converged = false;
  double dynamic = 0.0;
  double fixed = 0.0;
  long budget = 0;
};

Robustness compare_modes(const EigenProblem& prob, CycleSchedule sc) {
  Robustness r;
  const auto dyn = vcycle_eigen(prob, sc, 1);
  const auto& rep = dyn.reports.front();
  r.converged = rep.converged;
  r.dynamic = dyn.states.front().energy;
  r.budget = rep.total_updates();
  const double slack = 1e-10 * std::max(1.0, std::abs(r.dynamic));
  for (std::size_t k = 1; k < rep.sweeps.size(); ++k)
    if (rep.sweeps[k].level == rep.sweeps[k - 1].level && rep.sweeps[k].energy > rep.sweeps[k - 1].energy + slack) r.monotone = false;
  sc.static_mode = true;
  sc.sweep.max_local_updates = r.budget;
  sc.sweep.max_sweeps = 1000;
  r.fixed = vcycle_eigen(prob, sc, 1).states.front().energy;
  return r;
}

Verdict multigrid_robustness() {
  // 1D harmonic oscillator; 2^10 points keep ||H|| near 5e3, so roundoff in the energy stays well under the 1e-10 slack
  const auto line = QuanticsGrid::line(-10.0, 10.0, 10);
  std::vector<double> v(line.points(0));
  for (std::uint64_t a = 0; a < v.size(); ++a) v[a] = 0.5 * line.coordinate(0, a) * line.coordinate(0, a);
  EigenProblem ho;
  ho.grid = line;
  ho.potential = from_dense(v, {64, 1e-28});
  ho.build = [](const QuanticsGrid& g, const TensorTrain* pot) {
    HamiltonianSpec hs;
    hs.kinetic = {0.5};
    hs.potential = *pot;
    return assemble_hamiltonian(hs, g, BoundaryCondition::uniform(1, BoundaryKind::DirichletZero));
  };
  ho.edges = {EdgeMode::Open};
  CycleSchedule sc;
  sc.n_min = 5;
  sc.sweep.max_sweeps = 20;
  sc.sweep.min_sweeps = 2;
  sc.sweep.tol = 1e-12;
  sc.sweep.truncation.max_bond = 16;
  sc.sweep.truncation.rel_tol = 1e-24;
  sc.sweep.krylov_tol = 1e-12;
  const auto a = compare_modes(ho, sc);

  // desk H2+
  H2PlusSpec s;
  const auto grid = h2_grid_3d(s);
  const auto pot = h2_potential_3d(s, grid);
  const auto b = compare_modes(h2_problem_3d(s, grid, pot.train), h2_schedule(12));

  auto ok = [](const Robustness& r) { return r.converged && r.monotone && r.dynamic <= r.fixed + 1e-10 * std::max(1.0, std::abs(r.fixed)); };
  return {ok(a) && ok(b),
          fmt("HO N=10: dynamic %.12f (converged %d, monotone %d) vs static %.12f (diff %.1e) at %ld updates; "
              "H2+ N=24: dynamic %.10f (converged %d, monotone %d) vs static %.10f (diff %.1e) at %ld updates",
              a.dynamic, a.converged, a.monotone, a.fixed, a.dynamic - a.fixed, a.budget, b.dynamic, b.converged, b.monotone,
              b.fixed, b.dynamic - b.fixed, b.budget)};
}

// ---------------------------------------------------------------------------- 9. vibrations

constexpr double kOmegaReference = 2191.1;  // cm^-1
constexpr double kZeroPointReference = 5.239e-3;

Verdict vibrational_pipeline() {
  std::vector<std::string> notes;
  bool ok = true;

  // 3D+1D: clamped-nuclei curve on a 2^8-per-dim grid, R commensurate with the spacing
  {
    H2PlusSpec base;
    base.box = 12.0;
    base.bits = 8;
    const double h = 2.0 * base.box / 256.0;
    std::vector<double> r;
    for (int m : {6, 7, 8, 9, 10, 11, 12, 13, 14, 16, 18, 21}) r.push_back(2.0 * m * h);
    const auto e = electronic_curve(r, base, h2_schedule(12));
    const auto grid = QuanticsGrid::line(1.0, 4.0, 10);
    const auto vib = vibrational_1d(r, e, base.reduced_mass(), grid, 1);
    const double omega = vib.fit.omega_cm();
    const double zpe = vib.energies.front() - vib.fit.e_min;
    const bool w_ok = std::abs(omega - kOmegaReference) <= 0.05 * kOmegaReference;
    const bool z_ok = std::abs(zpe - kZeroPointReference) <= 0.5e-3;
    ok = ok && w_ok && z_ok;
    notes.push_back(fmt("omega %.1f cm^-1 (ref %.1f, 5%%: %s), zero point %.3f mHa (ref %.3f, 0.5 mHa: %s)", omega, kOmegaReference,
                        w_ok ? "ok" : "FAIL", 1e3 * zpe, 1e3 * kZeroPointReference, z_ok ? "ok" : "FAIL"));
  }

  // 4D at N = 4 x 6 against 3D+1D on the same electron and R grids
  {
    H2PlusSpec s;
    s.bits = s.r_bits = 6;
    s.box = 12.0;
    s.r_lo = 0.5;
    s.r_hi = 6.5;
    const auto grid = h2_grid_4d(s);
    const auto pot = h2_potential_4d(s, grid);
    CycleSchedule sc = h2_schedule(16);
    sc.sweep.truncation.max_bond = 48;
    sc.sweep.min_sweeps = 2;
    sc.sweep.tol = 1e-9;
    const auto res = vcycle_eigen(h2_problem_4d(s, grid, pot.train), sc, 1);
    const auto& psi = res.states.front().state;
    const double e4 = res.states.front().energy;
    // nuclear density by tracing out the electron through its own contraction path
    const auto nn = to_dense(partial_density(psi, grid, {1, 2, 3}));
    double integral = 0.0;
    for (double x : nn) integral += x;
    integral /= inner(psi, psi);

    std::vector<double> r(grid.points(0));
    for (std::uint64_t a = 0; a < r.size(); ++a) r[a] = cell_center(grid, 0, a);
    H2PlusSpec el = s;
    auto esc = h2_schedule(12);
    esc.sweep.truncation.max_bond = 48;
    const auto e = electronic_curve(r, el, esc);
    const auto rgrid = QuanticsGrid::line(s.r_lo, s.r_hi, s.r_bits);
    const double e31 = vibrational_1d(r, e, s.reduced_mass(), rgrid, 1).energies.front();
    const bool below = e4 < e31;
    const bool norm_ok = std::abs(integral - 1.0) <= 1e-8;
    ok = ok && below && norm_ok;
    notes.push_back(fmt("4D N=24: E = %.6f vs 3D+1D %.6f (4D below: %s), nuclear density integral - 1 = %.1e (1e-8: %s)", e4, e31,
                        below ? "ok" : "FAIL", integral - 1.0, norm_ok ? "ok" : "FAIL"));
  }
  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

// ---------------------------------------------------------------------------- 10. TCI

Verdict tci_ranks() {
  struct Case {
    const char* name;
    std::function<double(double)> f;
    Index rank;
  };
  const std::vector<Case> cases{{"exp(-x)", [](double x) { return std::exp(-x); }, 1},
                                {"cos(3x)", [](double x) { return std::cos(3.0 * x); }, 2},
                                {"cubic", [](double x) { return 1.0 - x + 0.25 * x * x - 0.02 * x * x * x; }, 4}};
  const auto line = QuanticsGrid::line(0.0, 6.0, 12);
  bool ranks_ok = true;
  std::string ranks;
  for (const auto& c : cases) {
    FunctionAdaptor f([&](std::span<const double> x) { return c.f(x[0]); });
    const auto res = cross_interpolate(f, line, 16, 1e-12, 6);
    const auto exact = sample_dense(line, f);
    const auto approx = to_dense(res.train);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      err = std::max(err, std::abs(exact[i] - approx[i]));
      scale = std::max(scale, std::abs(exact[i]));
    }
    const bool ok = res.train.max_bond() == c.rank && err <= 1e-10 * scale;
    ranks_ok = ranks_ok && ok;
    ranks += fmt(" %s rank %ld (want %ld)", c.name, static_cast<long>(res.train.max_bond()), static_cast<long>(c.rank));
  }

  H2PlusSpec s;
  const auto grid = h2_grid_3d(s);
  const double h = 0.5 * grid.spacing(0);
  FunctionAdaptor coulomb([h, R = s.R](std::span<const double> p) { return coulomb_kernel(R, p[0] + h, p[1] + h, p[2] + h); });
  const auto sweep = pivot_error_sweep(coulomb, grid, {25, 50, 100}, 8);
  bool decreasing = true;
  for (std::size_t i = 1; i < sweep.size(); ++i) decreasing = decreasing && sweep[i].second < sweep[i - 1].second;
  return {ranks_ok && decreasing, "exact ranks:" + ranks +
                                      fmt("; Coulomb 2^8 per dim eps_TCI chi=25: %.2e, 50: %.2e, 100: %.2e", sweep[0].second,
                                          sweep[1].second, sweep[2].second)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "dense-oracle equivalence", dense_equivalence},
      {2, "Poisson benchmark", poisson_benchmark},
      {3, "parameter count", parameter_count},
      {4, "charge conservation", charge_conservation},
      {5, "prolongation and shifts", prolongation_exactness},
      {6, "H2+ 3D ground state", h2_ground_state},
      {7, "H2+ excited state", h2_excited_state},
      {8, "multigrid robustness", multigrid_robustness},
      {9, "vibrational pipeline", vibrational_pipeline},
      {10, "TCI", tci_ranks},
  };
  bool all_pass = true;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s: %s [%.0f s]\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), dt);
    std::fflush(stdout);
    all_pass = all_pass && v.pass;
  }
  return all_pass ? 0 : 1;
}
