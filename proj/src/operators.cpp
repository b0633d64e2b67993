#include "qtt/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtt {

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::DirichletZero: return "dirichlet-zero";
    case BoundaryKind::DirichletData: return "dirichlet-data";
    case BoundaryKind::Periodic: return "periodic";
  }
  return "dirichlet-zero";
}

BoundaryKind boundary_from_string(const std::string& name) {
  if (name == "dirichlet-zero") return BoundaryKind::DirichletZero;
  if (name == "dirichlet-data") return BoundaryKind::DirichletData;
  if (name == "periodic") return BoundaryKind::Periodic;
  throw std::invalid_argument("unknown boundary '" + name + "'");
}

BoundaryCondition BoundaryCondition::uniform(int dims, BoundaryKind kind) {
  BoundaryCondition bc;
  DimBoundary d;
  d.kind = kind;
  bc.dims.assign(static_cast<std::size_t>(dims), d);
  return bc;
}

std::vector<EdgeMode> BoundaryCondition::edges() const {
  std::vector<EdgeMode> e;
  for (const auto& d : dims) e.push_back(d.edge());
  return e;
}

QuanticsGrid drop_dimension(const QuanticsGrid& grid, int dim) {
  if (grid.dims() < 2) throw std::invalid_argument("drop_dimension: grid has a single dimension");
  std::vector<Interval> dom;
  std::vector<int> bits;
  for (int d = 0; d < grid.dims(); ++d)
    if (d != dim) {
      dom.push_back(grid.domain(d));
      bits.push_back(grid.bits(d));
    }
  auto rename = [dim](int d) { return d > dim ? d - 1 : d; };
  std::vector<std::vector<int>> groups;
  for (const auto& g : grid.groups()) {
    std::vector<int> ng;
    for (int d : g)
      if (d != dim) ng.push_back(rename(d));
    if (!ng.empty()) groups.push_back(ng);
  }
  return QuanticsGrid(dom, bits, grid.ordering(), groups);
}

namespace {

const DimBoundary& boundary_of(const BoundaryCondition& bc, int dim) {
  if (dim < 0 || static_cast<std::size_t>(dim) >= bc.dims.size())
    throw std::invalid_argument("boundary condition missing for dimension " + std::to_string(dim));
  return bc.dims[static_cast<std::size_t>(dim)];
}

// Puts a train over the other dimensions onto the full grid (constant along `dim`).
TensorTrain spread_face(const QuanticsGrid& grid, int dim, const TensorTrain& face) {
  if (face.size() + static_cast<std::size_t>(grid.bits(dim)) != grid.total_bits())
    throw ShapeError("dirichlet face does not match the grid");
  std::vector<Core> cores;
  std::size_t next = 0;
  Index bond = 1;
  for (std::size_t site = 0; site < grid.total_bits(); ++site) {
    if (grid.slot(site).dim == dim) {
      Core c(bond, bond);
      for (Index k = 0; k < bond; ++k) c(k, 0, k) = c(k, 1, k) = 1.0;
      cores.push_back(std::move(c));
    } else {
      cores.push_back(face.core(next++));
      bond = cores.back().right();
    }
  }
  return TensorTrain(std::move(cores));
}

TensorTrain face_on_row(const QuanticsGrid& grid, int dim, std::uint64_t row, double value,
                        const std::optional<TensorTrain>& face) {
  std::vector<std::vector<double>> v;
  const int bits = grid.bits(dim);
  for (int level = 0; level < bits; ++level)
    v.push_back(((row >> (bits - 1 - level)) & 1U) ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0, 0.0});
  TensorTrain line = embed_dimension(grid, dim, scale(product_train(v), face ? 1.0 : value));
  if (!face) return line;
  return hadamard(line, spread_face(grid, dim, *face));
}

}  // namespace

TensorTrainOperator laplacian_mpo(const QuanticsGrid& grid, const BoundaryCondition& bc, int dim) {
  const auto& b = boundary_of(bc, dim);
  const double h = grid.spacing(dim);
  const double inv = 1.0 / (h * h);
  const double wrap = b.kind == BoundaryKind::Periodic ? 1.0 : 0.0;
  // states: 0 = settled, 1 = raising carry, 2 = lowering carry
  auto bit = [](int) {
    OpCore c(3, 3);
    c(0, 0, 0, 0) = c(0, 1, 1, 0) = 1.0;
    c(0, 1, 0, 1) = 1.0;
    c(1, 0, 1, 1) = 1.0;
    c(0, 0, 1, 2) = 1.0;
    c(2, 1, 0, 2) = 1.0;
    return c;
  };
  return dimension_mpo(grid, dim, bit, {1.0, wrap, wrap}, {-2.0 * inv, inv, inv});
}

TensorTrainOperator kinetic_mpo(const QuanticsGrid& grid, const BoundaryCondition& bc, const std::vector<double>& coeff,
                                double rel_tol) {
  if (static_cast<int>(coeff.size()) != grid.dims()) throw std::invalid_argument("kinetic_mpo: one coefficient per dimension");
  std::optional<TensorTrainOperator> acc;
  for (int d = 0; d < grid.dims(); ++d) {
    const double c = coeff[static_cast<std::size_t>(d)];
    if (c == 0.0) continue;
    auto term = scale(laplacian_mpo(grid, bc, d), -c);
    acc = acc ? compress(add(*acc, term), rel_tol) : term;
  }
  if (!acc) return scale(identity_operator(grid.total_bits()), 0.0);
  return *acc;
}

TensorTrain dirichlet_rhs(const QuanticsGrid& grid, const BoundaryCondition& bc) {
  std::optional<TensorTrain> acc;
  for (int d = 0; d < grid.dims(); ++d) {
    const auto& b = boundary_of(bc, d);
    if (b.kind != BoundaryKind::DirichletData) continue;
    if ((b.lower_face || b.upper_face) && grid.dims() < 2)
      throw std::invalid_argument("dirichlet_rhs: face trains need at least two dimensions");
    const double inv = 1.0 / (grid.spacing(d) * grid.spacing(d));
    const bool has_lower = b.lower_face || b.lower_value != 0.0;
    const bool has_upper = b.upper_face || b.upper_value != 0.0;
    if (has_lower) {
      auto t = scale(face_on_row(grid, d, 0, b.lower_value, b.lower_face), inv);
      acc = acc ? add(*acc, t) : t;
    }
    if (has_upper) {
      auto t = scale(face_on_row(grid, d, grid.points(d) - 1, b.upper_value, b.upper_face), inv);
      acc = acc ? add(*acc, t) : t;
    }
  }
  if (!acc) return zero_train(grid.total_bits());
  return truncate(*acc, TruncationPolicy{std::numeric_limits<Index>::max(), 1e-28}).train;
}

TensorTrainOperator diagonal_mpo(const TensorTrain& v) {
  std::vector<OpCore> cores;
  for (const auto& c : v.cores()) {
    OpCore o(c.left(), c.right());
    for (Index l = 0; l < c.left(); ++l)
      for (int s = 0; s < 2; ++s)
        for (Index r = 0; r < c.right(); ++r) o(l, s, s, r) = c(l, s, r);
    cores.push_back(std::move(o));
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator projector_mpo(const TensorTrain& psi) {
  std::vector<OpCore> cores;
  for (const auto& c : psi.cores()) {
    OpCore o(c.left() * c.left(), c.right() * c.right());
    for (Index l = 0; l < c.left(); ++l)
      for (Index l2 = 0; l2 < c.left(); ++l2)
        for (int so = 0; so < 2; ++so)
          for (int si = 0; si < 2; ++si)
            for (Index r = 0; r < c.right(); ++r)
              for (Index r2 = 0; r2 < c.right(); ++r2) o(l * c.left() + l2, so, si, r * c.right() + r2) = c(l, so, r) * c(l2, si, r2);
    cores.push_back(std::move(o));
  }
  return TensorTrainOperator(std::move(cores));
}

double default_penalty_weight(double previous_energy) { return 10.0 * std::max(std::fabs(previous_energy), 1e-3); }

TensorTrainOperator assemble_hamiltonian(const HamiltonianSpec& spec, const QuanticsGrid& grid,
                                         const BoundaryCondition& bc, bool include_penalties) {
  TensorTrainOperator h = kinetic_mpo(grid, bc, spec.kinetic, spec.compress_tol);
  auto add_diag = [&](const std::optional<TensorTrain>& v) {
    if (!v) return;
    if (v->size() != grid.total_bits()) throw ShapeError("assemble_hamiltonian: potential does not match grid");
    h = compress(add(h, diagonal_mpo(*v)), spec.compress_tol);
  };
  add_diag(spec.potential);
  add_diag(spec.external);
  if (include_penalties)
    for (const auto& p : spec.penalties) {
      if (p.weight <= 0.0) throw std::invalid_argument("penalty weights must be positive");
      h = compress(add(h, projector_mpo(p.state), 1.0, p.weight), spec.compress_tol);
    }
  return h;
}

TensorTrain external_field(const QuanticsGrid& grid, int dim, double amplitude) {
  const double k = std::numbers::pi / 2.0;
  const auto wave = sine_train(grid.bits(dim), k * grid.domain(dim).lo, k * grid.spacing(dim));
  return embed_dimension(grid, dim, scale(wave, amplitude));
}

}  // namespace qtt
