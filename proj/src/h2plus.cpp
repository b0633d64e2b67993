#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <exception>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qtt/problems.hpp"

namespace qtt {

double coulomb_kernel(double R, double x, double y, double z) {
  const double ra = std::sqrt((x - 0.5 * R) * (x - 0.5 * R) + y * y + z * z);
  const double rb = std::sqrt((x + 0.5 * R) * (x + 0.5 * R) + y * y + z * z);
  if (R == 0.0 || ra == 0.0 || rb == 0.0) {
    std::ostringstream os;
    os << "coulomb_kernel: singular point (R, x, y, z) = (" << R << ", " << x << ", " << y << ", " << z << ")";
    throw std::domain_error(os.str());
  }
  return 1.0 / R - 1.0 / ra - 1.0 / rb;
}

double cell_center(const QuanticsGrid& grid, int dim, std::uint64_t index) {
  return grid.coordinate(dim, index) + 0.5 * grid.spacing(dim);
}

void H2PlusSpec::validate() const {
  if (!(box > 0.0)) throw std::invalid_argument("h2plus: box must be positive");
  if (bits < 1) throw std::invalid_argument("h2plus: bits must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("h2plus: R must be positive");
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw std::invalid_argument("h2plus: the R interval must lie above 0");
  if (!(mass > 0.0)) throw std::invalid_argument("h2plus: mass must be positive");
  if (potential_bond < 1) throw std::invalid_argument("h2plus: potential_bond must be positive");
}

QuanticsGrid h2_grid_3d(const H2PlusSpec& s) {
  s.validate();
  const Interval iv{-s.box, s.box};
  std::vector<std::vector<int>> groups;
  if (s.ordering == BitOrdering::Interleaved) groups = {{0, 1, 2}};
  return QuanticsGrid({iv, iv, iv}, {s.bits, s.bits, s.bits}, s.ordering, groups);
}

QuanticsGrid h2_grid_4d(const H2PlusSpec& s) {
  s.validate();
  if (s.r_bits != s.bits) throw std::invalid_argument("h2plus: R and x are interleaved, so r_bits must equal bits");
  const Interval iv{-s.box, s.box};
  return QuanticsGrid({{s.r_lo, s.r_hi}, iv, iv, iv}, {s.r_bits, s.bits, s.bits, s.bits}, BitOrdering::Interleaved,
                      {{0, 1}, {2}, {3}});
}

namespace {

TciConfig potential_config(const H2PlusSpec& s) {
  TciConfig cfg;
  cfg.max_bond = s.potential_bond;
  cfg.tol = s.potential_tol;
  cfg.max_sweeps = s.potential_sweeps;
  return cfg;
}

}  // namespace

TciResult h2_potential_3d(const H2PlusSpec& s, const QuanticsGrid& grid) {
  if (grid.dims() != 3) throw std::invalid_argument("h2_potential_3d: three dimensions expected");
  const double hx = 0.5 * grid.spacing(0), hy = 0.5 * grid.spacing(1), hz = 0.5 * grid.spacing(2);
  const double R = s.R;
  FunctionAdaptor f([=](std::span<const double> p) { return coulomb_kernel(R, p[0] + hx, p[1] + hy, p[2] + hz); });
  return cross_interpolate(f, grid, potential_config(s));
}

TciResult h2_potential_4d(const H2PlusSpec& s, const QuanticsGrid& grid) {
  if (grid.dims() != 4) throw std::invalid_argument("h2_potential_4d: four dimensions expected");
  const double hr = 0.5 * grid.spacing(0), hx = 0.5 * grid.spacing(1), hy = 0.5 * grid.spacing(2),
               hz = 0.5 * grid.spacing(3);
  FunctionAdaptor f([=](std::span<const double> p) { return coulomb_kernel(p[0] + hr, p[1] + hx, p[2] + hy, p[3] + hz); });
  return cross_interpolate(f, grid, potential_config(s));
}

TciResult ha_potential_3d(const H2PlusSpec& s, const QuanticsGrid& grid, double r0, double sigma) {
  if (grid.dims() != 3) throw std::invalid_argument("ha_potential_3d: three dimensions expected");
  const auto veff = effective_potential_ha(r0, sigma);
  const double hx = 0.5 * grid.spacing(0), hy = 0.5 * grid.spacing(1), hz = 0.5 * grid.spacing(2);
  FunctionAdaptor f([=](std::span<const double> p) {
    const std::array<double, 3> c{p[0] + hx, p[1] + hy, p[2] + hz};
    return veff(c);
  });
  return cross_interpolate(f, grid, potential_config(s));
}

std::vector<double> electronic_curve(const std::vector<double>& r_values, const H2PlusSpec& base,
                                     const CycleSchedule& schedule, int jobs, std::vector<SolveReport>* reports) {
  if (jobs < 1) throw std::invalid_argument("electronic_curve: jobs must be positive");
  const auto n = static_cast<long>(r_values.size());
  std::vector<double> energies(r_values.size());
  std::vector<SolveReport> reps(r_values.size());
  std::vector<std::exception_ptr> errors(r_values.size());
#pragma omp parallel for num_threads(jobs) schedule(dynamic) if (jobs > 1)
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      H2PlusSpec s = base;
      s.R = r_values[i];
      const auto grid = h2_grid_3d(s);
      const auto pot = h2_potential_3d(s, grid).train;
      auto res = vcycle_eigen(h2_problem_3d(s, grid, pot), schedule, 1);
      energies[i] = res.states.front().energy;
      reps[i] = std::move(res.reports.front());
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (reports) *reports = std::move(reps);
  return energies;
}

EigenProblem h2_problem_3d(const H2PlusSpec& s, const QuanticsGrid& grid, const TensorTrain& potential) {
  if (potential.size() != grid.total_bits()) throw ShapeError("h2_problem_3d: potential does not match the grid");
  EigenProblem prob;
  prob.grid = grid;
  prob.potential = potential;
  const double field = s.field;
  prob.build = [field](const QuanticsGrid& g, const TensorTrain* pot) {
    HamiltonianSpec hs;
    hs.kinetic = {0.5, 0.5, 0.5};
    if (pot) hs.potential = *pot;
    if (field != 0.0) {
      // the field is sampled at cell centres like everything else
      const double h = g.spacing(0);
      const auto shifted = g.with_domain(0, {g.domain(0).lo + 0.5 * h, g.domain(0).hi + 0.5 * h});
      hs.external = external_field(shifted, 0, field);
    }
    return assemble_hamiltonian(hs, g, BoundaryCondition::uniform(3, BoundaryKind::DirichletZero));
  };
  prob.edges.assign(3, EdgeMode::Open);
  return prob;
}

EigenProblem h2_problem_4d(const H2PlusSpec& s, const QuanticsGrid& grid, const TensorTrain& potential) {
  if (potential.size() != grid.total_bits()) throw ShapeError("h2_problem_4d: potential does not match the grid");
  EigenProblem prob;
  prob.grid = grid;
  prob.potential = potential;
  const double mu = s.reduced_mass();
  prob.build = [mu](const QuanticsGrid& g, const TensorTrain* pot) {
    HamiltonianSpec hs;
    const double ke = 0.5 * (1.0 + 1.0 / (4.0 * mu));
    hs.kinetic = {0.5 / mu, ke, ke, ke};
    if (pot) hs.potential = *pot;
    return assemble_hamiltonian(hs, g, BoundaryCondition::uniform(4, BoundaryKind::DirichletZero));
  };
  prob.edges.assign(4, EdgeMode::Open);
  return prob;
}

// ---------------------------------------------------------------------------- effective potential

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = 2.0 * v * v;
  }
}

namespace {

// int_lo^hi dR / sqrt((R/2 - x)^2 + d2)
double kernel_integral(double lo, double hi, double x, double d2) {
  const double d = std::sqrt(d2);
  return 2.0 * (std::asinh((0.5 * hi - x) / d) - std::asinh((0.5 * lo - x) / d));
}

}  // namespace

FunctionAdaptor effective_potential_ha(double r0, double sigma, int nodes) {
  if (!(sigma > 0.0)) throw std::invalid_argument("effective_potential_ha: sigma must be positive");
  std::vector<double> t, w;
  gauss_legendre(nodes, t, w);
  const double lo = std::max(0.0, r0 - 10.0 * sigma), hi = r0 + 10.0 * sigma;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  auto rho = [=](double R) { return norm * std::exp(-0.5 * (R - r0) * (R - r0) / (sigma * sigma)); };
  constexpr int kPanels = 8;
  return FunctionAdaptor([=](std::span<const double> p) {
    const double d2 = p[1] * p[1] + p[2] * p[2];
    double total = 0.0;
    for (double sx : {p[0], -p[0]}) {
      // 1/|r -+ R/2| peaks at R* = 2 x; subtract rho(R*) there
      const double rstar = 2.0 * sx;
      const bool near = d2 > 0.0 && rstar > lo && rstar < hi;
      if (d2 == 0.0 && rstar >= lo && rstar <= hi) {
        std::ostringstream os;
        os << "effective_potential_ha: logarithmic singularity on the axis at x = " << p[0];
        throw std::domain_error(os.str());
      }
      const double peak = near ? rho(rstar) : 0.0;
      double acc = near ? peak * kernel_integral(lo, hi, sx, d2) : 0.0;
      const double step = (hi - lo) / kPanels;
      for (int k = 0; k < kPanels; ++k) {
        const double a = lo + k * step, mid = a + 0.5 * step;
        for (std::size_t i = 0; i < t.size(); ++i) {
          const double R = mid + 0.5 * step * t[i];
          const double dist = std::sqrt((0.5 * R - sx) * (0.5 * R - sx) + d2);
          acc += 0.5 * step * w[i] * (rho(R) - peak) / dist;
        }
      }
      total += acc;
    }
    return -total;
  });
}

FunctionAdaptor effective_potential(const std::vector<double>& r_points, const std::vector<double>& density) {
  if (r_points.size() != density.size() || r_points.size() < 2)
    throw std::invalid_argument("effective_potential: need matching R points and density values");
  std::vector<double> w(r_points.size(), 0.0);
  for (std::size_t k = 0; k + 1 < r_points.size(); ++k) {
    const double dr = r_points[k + 1] - r_points[k];
    w[k] += 0.5 * dr * density[k];
    w[k + 1] += 0.5 * dr * density[k + 1];
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) throw std::invalid_argument("effective_potential: density integrates to zero");
  for (double& v : w) v /= total;
  return FunctionAdaptor([r_points, w](std::span<const double> p) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double R = r_points[k];
      const double a = std::sqrt((p[0] - 0.5 * R) * (p[0] - 0.5 * R) + p[1] * p[1] + p[2] * p[2]);
      const double b = std::sqrt((p[0] + 0.5 * R) * (p[0] + 0.5 * R) + p[1] * p[1] + p[2] * p[2]);
      acc += w[k] * (1.0 / a + 1.0 / b);
    }
    return -acc;
  });
}

// ---------------------------------------------------------------------------- vibrations

ParabolaFit fit_parabola(const std::vector<double>& r, const std::vector<double>& e, double mu, int points) {
  if (r.size() != e.size() || static_cast<int>(r.size()) < points || points < 3)
    throw std::invalid_argument("fit_parabola: need at least `points` >= 3 samples");
  const auto imin = static_cast<int>(std::min_element(e.begin(), e.end()) - e.begin());
  const int n = static_cast<int>(r.size());
  const int first = std::clamp(imin - points / 2, 0, n - points);
  const double r0 = r[static_cast<std::size_t>(imin)];
  Eigen::MatrixXd a(points, 3);
  Eigen::VectorXd b(points);
  for (int k = 0; k < points; ++k) {
    const double x = r[static_cast<std::size_t>(first + k)] - r0;
    a(k, 0) = 1.0;
    a(k, 1) = x;
    a(k, 2) = x * x;
    b(k) = e[static_cast<std::size_t>(first + k)];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  if (!(c(2) > 0.0)) throw std::runtime_error("fit_parabola: samples are not convex around the minimum");
  ParabolaFit fit;
  fit.curvature = c(2);
  fit.r_min = r0 - c(1) / (2.0 * c(2));
  fit.e_min = c(0) - c(1) * c(1) / (4.0 * c(2));
  fit.omega = std::sqrt(2.0 * c(2) / mu);
  return fit;
}

std::vector<double> cubic_spline(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& at) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 3 || y.size() != x.size()) throw std::invalid_argument("cubic_spline: need at least three points");
  for (Eigen::Index i = 1; i < n; ++i)
    if (!(x[static_cast<std::size_t>(i)] > x[static_cast<std::size_t>(i - 1)]))
      throw std::invalid_argument("cubic_spline: abscissae must increase");
  // second derivatives with natural ends
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  m(0, 0) = m(n - 1, n - 1) = 1.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double h0 = x[u] - x[u - 1], h1 = x[u + 1] - x[u];
    m(i, i - 1) = h0 / 6.0;
    m(i, i) = (h0 + h1) / 3.0;
    m(i, i + 1) = h1 / 6.0;
    rhs(i) = (y[u + 1] - y[u]) / h1 - (y[u] - y[u - 1]) / h0;
  }
  const Eigen::VectorXd d2 = m.partialPivLu().solve(rhs);
  std::vector<double> out;
  out.reserve(at.size());
  for (double t : at) {
    auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    k = std::clamp<std::size_t>(k, 1, x.size() - 1);
    const double h = x[k] - x[k - 1];
    const double a = (x[k] - t) / h, b = (t - x[k - 1]) / h;
    out.push_back(a * y[k - 1] + b * y[k] +
                  ((a * a * a - a) * d2(static_cast<Eigen::Index>(k - 1)) + (b * b * b - b) * d2(static_cast<Eigen::Index>(k))) * h * h / 6.0);
  }
  return out;
}

CycleSchedule vibrational_schedule(const QuanticsGrid& grid) {
  CycleSchedule sched;
  sched.n_min = std::min(grid.bits(0), 4);
  sched.sweep.max_sweeps = 30;
  sched.sweep.min_sweeps = 2;
  sched.sweep.tol = 1e-13;
  // eigenvalue error is quadratic in the local residual
  sched.sweep.krylov_tol = 1e-9;
  sched.sweep.truncation.rel_tol = 1e-26;
  sched.sweep.truncation.max_bond = 32;
  return sched;
}

VibrationalResult vibrational_1d(const std::vector<double>& r, const std::vector<double>& e, double mu,
                                 const QuanticsGrid& grid, int n_states, int fit_points, const CycleSchedule* schedule,
                                 double penalty_weight) {
  if (grid.dims() != 1) throw std::invalid_argument("vibrational_1d: one-dimensional grid expected");
  if (!(mu > 0.0)) throw std::invalid_argument("vibrational_1d: reduced mass must be positive");
  if (!(penalty_weight > 0.0)) throw std::invalid_argument("vibrational_1d: penalty weight must be positive");
  VibrationalResult res;
  res.grid = grid;
  res.fit = fit_parabola(r, e, mu, fit_points);
  std::vector<double> at(grid.points(0));
  for (std::uint64_t a = 0; a < at.size(); ++a) at[a] = cell_center(grid, 0, a);
  const auto values = cubic_spline(r, e, at);
  TruncationPolicy tight;
  tight.rel_tol = 1e-28;
  EigenProblem prob;
  prob.grid = grid;
  prob.potential = from_dense(values, tight);
  prob.build = [mu](const QuanticsGrid& g, const TensorTrain* pot) {
    HamiltonianSpec hs;
    hs.kinetic = {0.5 / mu};
    if (pot) hs.potential = *pot;
    return assemble_hamiltonian(hs, g, BoundaryCondition::uniform(1, BoundaryKind::DirichletZero));
  };
  prob.edges = {EdgeMode::Open};
  const CycleSchedule sched = schedule ? *schedule : vibrational_schedule(grid);
  // the smallest physical level spacing sets the penalty scale, not |E|
  std::vector<double> weights(static_cast<std::size_t>(std::max(0, n_states - 1)), penalty_weight);
  auto cyc = vcycle_eigen(prob, sched, n_states, weights);
  for (const auto& st : cyc.states) {
    res.energies.push_back(st.energy);
    res.states.push_back(st.state);
  }
  res.reports = std::move(cyc.reports);
  return res;
}

}  // namespace qtt
