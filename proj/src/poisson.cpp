#include <cmath>
#include <stdexcept>

#include "qtt/problems.hpp"

namespace qtt {

void PoissonBenchmark::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("poisson: strip height h must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("poisson: gate half-width c must be positive");
  if (!(half_length > c)) throw std::invalid_argument("poisson: half_length must exceed c");
}

double analytic_benchmark(double x, double y, const PoissonBenchmark& p) {
  if (y <= 0.0) return 0.0;
  if (y >= p.h) return std::fabs(x) < p.c ? p.v_top : p.v_gate;
  const double s = std::sin(M_PI * y / p.h), co = std::cos(M_PI * y / p.h);
  const double a1 = (std::exp(M_PI * (p.c - x) / p.h) + co) / s;
  const double a2 = (std::exp(-M_PI * (p.c + x) / p.h) + co) / s;
  return p.v_gate * y / p.h + (p.v_top - p.v_gate) / M_PI * (std::atan(a1) - std::atan(a2));
}

namespace {

Interval strip_y(const PoissonBenchmark& p, int bits) {
  const double dy = p.h / (std::ldexp(1.0, bits) + 1.0);
  return {dy, p.h};
}

}  // namespace

QuanticsGrid strip_grid(const PoissonBenchmark& p, int bits_x, int bits_y, BitOrdering ordering) {
  p.validate();
  std::vector<std::vector<int>> groups;
  if (ordering == BitOrdering::Interleaved) groups = {{0, 1}};
  return QuanticsGrid({{-p.half_length, p.half_length}, strip_y(p, bits_y)}, {bits_x, bits_y}, ordering, groups);
}

QuanticsGrid strip_grid_like(const PoissonBenchmark& p, const QuanticsGrid& like) {
  if (like.dims() != 2) throw std::invalid_argument("strip grid: two dimensions expected");
  return like.with_domain(0, {-p.half_length, p.half_length}).with_domain(1, strip_y(p, like.bits(1)));
}

BoundaryCondition strip_boundary(const PoissonBenchmark& p, const QuanticsGrid& grid, bool zero_top) {
  BoundaryCondition bc;
  bc.dims.resize(2);
  bc.dims[0].kind = BoundaryKind::Periodic;
  bc.dims[1].kind = BoundaryKind::DirichletData;
  if (!zero_top) {
    std::vector<double> top(grid.points(0));
    for (std::uint64_t a = 0; a < top.size(); ++a)
      top[a] = std::fabs(grid.coordinate(0, a)) < p.c ? p.v_top : p.v_gate;
    TruncationPolicy tight;
    tight.rel_tol = 1e-28;
    bc.dims[1].upper_face = from_dense(top, tight);
  }
  return bc;
}

LinearLevel strip_level(const PoissonBenchmark& p, const QuanticsGrid& grid_in, const TensorTrain* source, bool zero_top) {
  const QuanticsGrid grid = strip_grid_like(p, grid_in);
  const auto bc = strip_boundary(p, grid, zero_top);
  TensorTrainOperator op = kinetic_mpo(grid, bc, {1.0, 1.0});
  TensorTrain rhs = dirichlet_rhs(grid, bc);
  if (source) {
    if (source->size() != grid.total_bits()) throw ShapeError("strip_level: source does not match the grid");
    rhs = truncate(add(rhs, *source, 1.0, -1.0), TruncationPolicy{std::numeric_limits<Index>::max(), 1e-28}).train;
  }
  return {std::move(op), std::move(rhs)};
}

LinearProblem benchmark_problem(const PoissonBenchmark& p, const QuanticsGrid& fine) {
  LinearProblem prob;
  prob.grid = strip_grid_like(p, fine);
  prob.build = [p](const QuanticsGrid& g, const TensorTrain*) { return strip_level(p, g, nullptr); };
  prob.edges = {EdgeMode::Periodic, EdgeMode::Open};
  return prob;
}

TensorTrain benchmark_reference(const PoissonBenchmark& p, const QuanticsGrid& grid, Index max_bond, double tol) {
  FunctionAdaptor f([p](std::span<const double> x) { return analytic_benchmark(x[0], x[1], p); });
  TciConfig cfg;
  cfg.max_bond = max_bond;
  cfg.tol = tol;
  cfg.max_sweeps = 12;
  return cross_interpolate(f, grid, cfg).train;
}

double relative_error(const TensorTrain& f, const TensorTrain& reference) {
  const double rn = norm(reference);
  if (rn == 0.0) throw std::invalid_argument("relative_error: zero reference");
  return norm(add(f, reference, 1.0, -1.0)) / rn;
}

double benchmark_error(const TensorTrain& f, const PoissonBenchmark& p, const QuanticsGrid& grid) {
  return relative_error(f, benchmark_reference(p, strip_grid_like(p, grid)));
}

double oscillatory_density(double x, double y, double h, double w) {
  const double r2 = x * x + (y - 0.5 * h) * (y - 0.5 * h);
  return std::cos(8.0 * M_PI * r2 / (h * h)) * std::sin(M_PI * x / w);
}

TciResult density_train(const DensityProblem& d, const QuanticsGrid& grid) {
  const double h = d.geometry.h, w = d.w;
  FunctionAdaptor f([h, w](std::span<const double> x) { return oscillatory_density(x[0], x[1], h, w); });
  TciConfig cfg;
  cfg.max_bond = d.tci_bond;
  cfg.tol = d.tci_tol;
  cfg.max_sweeps = 12;
  return cross_interpolate(f, strip_grid_like(d.geometry, grid), cfg);
}

LinearProblem density_problem(const DensityProblem& d, const QuanticsGrid& fine, const TensorTrain& rho) {
  LinearProblem prob;
  prob.grid = strip_grid_like(d.geometry, fine);
  prob.source = rho;
  const auto geometry = d.geometry;
  const bool grounded = d.grounded;
  prob.build = [geometry, grounded](const QuanticsGrid& g, const TensorTrain* src) {
    return strip_level(geometry, g, src, grounded);
  };
  prob.edges = {EdgeMode::Periodic, EdgeMode::Open};
  return prob;
}

double grid_mean(const TensorTrain& f) {
  return inner(f, constant_train(f.size(), 1.0)) / std::ldexp(1.0, static_cast<int>(f.size()));
}

double cross_restriction_error(const TensorTrain& f_n, const QuanticsGrid& grid_n, const TensorTrain& f_ref,
                               const QuanticsGrid& grid_ref, RestrictionKind r_prime) {
  if (grid_n.dims() != grid_ref.dims()) throw std::invalid_argument("cross_restriction_error: dimension mismatch");
  if (f_n.size() != grid_n.total_bits() || f_ref.size() != grid_ref.total_bits())
    throw ShapeError("cross_restriction_error: train does not match its grid");
  TensorTrain g = f_ref;
  QuanticsGrid gg = grid_ref;
  for (int d = 0; d < grid_n.dims(); ++d) {
    if (grid_ref.bits(d) < grid_n.bits(d)) throw std::invalid_argument("cross_restriction_error: reference is coarser");
    while (gg.bits(d) > grid_n.bits(d)) std::tie(g, gg) = restrict_dim(g, gg, d, r_prime);
  }
  if (gg.layout() != grid_n.layout()) throw std::invalid_argument("cross_restriction_error: incompatible bit layouts");
  const double scale_n = std::ldexp(1.0, -static_cast<int>(f_n.size()));
  const double scale_ref = std::ldexp(1.0, -static_cast<int>(f_ref.size()));
  const double num = norm(add(f_n, g, 1.0, -1.0)) * std::sqrt(scale_n);
  const double den = norm(f_ref) * std::sqrt(scale_ref);
  return num / den;
}

}  // namespace qtt
