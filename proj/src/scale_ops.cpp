#include "qtt/scale_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace qtt {

namespace {

// Squared-weight tolerance of the final compression in the high-order prolongation (1e-12 in norm).
constexpr double kHighOrderRelTol = 1e-24;

OpCore identity_core(Index bond) {
  OpCore c(bond, bond);
  for (Index k = 0; k < bond; ++k) c(k, 0, 0, k) = c(k, 1, 1, k) = 1.0;
  return c;
}

// Carry tables for a +/-1 shift on one bit: state 0 = no carry, 1 = carry pending.
// raise: out = in + carry, lower: in = out + carry.
void fill_shift(OpCore& core, Index none, Index carry, bool raise) {
  core(none, 0, 0, none) = 1.0;
  core(none, 1, 1, none) = 1.0;
  if (raise) {
    core(none, 1, 0, carry) = 1.0;   // 0 -> 1, carry absorbed
    core(carry, 0, 1, carry) = 1.0;  // 1 -> 0, carry propagates
  } else {
    core(none, 0, 1, carry) = 1.0;
    core(carry, 1, 0, carry) = 1.0;
  }
}

int offset_bit(long offset, int bits, int level) {
  const std::uint64_t mask = bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
  const std::uint64_t twos = static_cast<std::uint64_t>(offset) & mask;
  return static_cast<int>((twos >> (bits - 1 - level)) & 1U);
}

void check_stencil(const Stencil& stencil, int bits) {
  if (stencil.empty()) throw std::invalid_argument("stencil must not be empty");
  const double limit = std::ldexp(1.0, bits);
  for (const auto& t : stencil)
    if (std::fabs(static_cast<double>(t.offset)) >= limit)
      throw std::invalid_argument("stencil offset " + std::to_string(t.offset) + " not representable in " +
                                  std::to_string(bits) + " bits");
}

Core block_core(const Core& f, const Core& g, bool close_left, bool close_right) {
  const Index l = close_left ? 1 : f.left() + g.left();
  const Index r = close_right ? 1 : f.right() + g.right();
  Core c(l, r);
  const Index gl = close_left ? 0 : f.left();
  const Index gr = close_right ? 0 : f.right();
  for (int s = 0; s < 2; ++s) {
    for (Index x = 0; x < f.left(); ++x)
      for (Index y = 0; y < f.right(); ++y) c(x, s, y) = f(x, s, y);
    for (Index x = 0; x < g.left(); ++x)
      for (Index y = 0; y < g.right(); ++y) c(gl + x, s, gr + y) += g(x, s, y);
  }
  return c;
}

}  // namespace

ProlongationKind ProlongationKind::high_order(Stencil s) {
  double sum = 0.0;
  for (const auto& t : s) sum += t.weight;
  if (std::fabs(sum - 1.0) > 1e-12) throw std::invalid_argument("high-order stencil weights must sum to 1");
  return {Type::HighOrder, std::move(s)};
}

ProlongationKind ProlongationKind::cubic() {
  return high_order({{-1, -1.0 / 16.0}, {0, 9.0 / 16.0}, {1, 9.0 / 16.0}, {2, -1.0 / 16.0}});
}

ProlongationKind ProlongationKind::smooth4() {
  return high_order({{-1, -1.0 / 6.0}, {0, 4.0 / 6.0}, {1, 4.0 / 6.0}, {2, -1.0 / 6.0}});
}

std::string to_string(RestrictionKind kind) { return kind == RestrictionKind::Cst ? "cst" : "avg"; }

RestrictionKind restriction_from_string(const std::string& name) {
  if (name == "cst") return RestrictionKind::Cst;
  if (name == "avg") return RestrictionKind::Avg;
  throw std::invalid_argument("unknown restriction '" + name + "' (expected cst or avg)");
}

std::string to_string(const ProlongationKind& kind) {
  switch (kind.type) {
    case ProlongationKind::Type::Constant: return "constant";
    case ProlongationKind::Type::Linear: return "linear";
    case ProlongationKind::Type::HighOrder: return kind.stencil.size() == 4 && kind.stencil[1].weight == 9.0 / 16.0 ? "cubic" : "smooth4";
  }
  return "linear";
}

ProlongationKind prolongation_from_string(const std::string& name) {
  if (name == "constant") return ProlongationKind::constant();
  if (name == "linear") return ProlongationKind::linear();
  if (name == "cubic") return ProlongationKind::cubic();
  if (name == "smooth4") return ProlongationKind::smooth4();
  throw std::invalid_argument("unknown prolongation '" + name + "' (expected constant, linear, cubic or smooth4)");
}

// ---------------------------------------------------------------------------- restriction

std::pair<TensorTrain, QuanticsGrid> restrict_dim(const TensorTrain& tt, const QuanticsGrid& grid, int dim,
                                                  RestrictionKind kind) {
  if (tt.size() != grid.total_bits()) throw ShapeError("restrict: train does not match grid");
  if (grid.bits(dim) < 2) throw std::invalid_argument("restrict: dimension " + std::to_string(dim) + " has a single bit");
  const std::size_t p = grid.site_of(dim, grid.bits(dim) - 1);
  const Core& last = tt.core(p);
  RowMatrix v = last.slice(0);
  if (kind == RestrictionKind::Avg) v = 0.5 * (v + last.slice(1));

  std::vector<Core> cores;
  cores.reserve(tt.size() - 1);
  for (std::size_t i = 0; i < tt.size(); ++i) {
    if (i == p) continue;
    if (p > 0 && i == p - 1) {
      const Core& c = tt.core(i);
      RowMatrix merged = c.left_unfolding() * v;  // (l s) x r'
      cores.push_back(Core::from_left_unfolding(merged));
    } else if (p == 0 && i == 1) {
      const Core& c = tt.core(i);
      RowMatrix merged = v * c.right_unfolding();
      cores.push_back(Core::from_right_unfolding(merged));
    } else {
      cores.push_back(tt.core(i));
    }
  }
  return {TensorTrain(std::move(cores)), grid.with_bits(dim, -1)};
}

std::pair<TensorTrain, QuanticsGrid> restrict(const TensorTrain& tt, const QuanticsGrid& grid, RestrictionKind kind) {
  std::pair<TensorTrain, QuanticsGrid> cur{tt, grid};
  for (int d = 0; d < grid.dims(); ++d) cur = restrict_dim(cur.first, cur.second, d, kind);
  return cur;
}

// ---------------------------------------------------------------------------- carry MPOs

TensorTrainOperator dimension_mpo(const QuanticsGrid& grid, int dim, const BitCoreFn& bit_core,
                                  const std::vector<double>& left_boundary,
                                  const std::vector<double>& right_boundary) {
  const int bits = grid.bits(dim);
  const Index k = static_cast<Index>(left_boundary.size());
  if (static_cast<Index>(right_boundary.size()) != k) throw ShapeError("dimension_mpo: boundary size mismatch");
  std::vector<OpCore> cores;
  bool inside = false;
  for (std::size_t site = 0; site < grid.total_bits(); ++site) {
    const auto& slot = grid.slot(site);
    if (slot.dim != dim) {
      cores.push_back(identity_core(inside ? k : 1));
      continue;
    }
    OpCore core = bit_core(slot.level);
    if (core.left() != k || core.right() != k) throw ShapeError("dimension_mpo: bit core has wrong bond");
    if (slot.level == 0) {
      OpCore closed(1, core.right());
      for (Index c = 0; c < k; ++c)
        for (int o = 0; o < 2; ++o)
          for (int i = 0; i < 2; ++i)
            for (Index r = 0; r < core.right(); ++r) closed(0, o, i, r) += left_boundary[static_cast<std::size_t>(c)] * core(c, o, i, r);
      core = std::move(closed);
    }
    if (slot.level == bits - 1) {
      OpCore closed(core.left(), 1);
      for (Index l = 0; l < core.left(); ++l)
        for (int o = 0; o < 2; ++o)
          for (int i = 0; i < 2; ++i)
            for (Index c = 0; c < k; ++c) closed(l, o, i, 0) += core(l, o, i, c) * right_boundary[static_cast<std::size_t>(c)];
      core = std::move(closed);
    }
    inside = slot.level < bits - 1;
    cores.push_back(std::move(core));
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator shift_mpo(const QuanticsGrid& grid, int dim, int offset, EdgeMode edge) {
  if (offset != 1 && offset != -1) throw std::invalid_argument("shift_mpo: offset must be +1 or -1");
  auto bit = [offset](int) {
    OpCore c(2, 2);
    fill_shift(c, 0, 1, offset > 0);
    return c;
  };
  return dimension_mpo(grid, dim, bit, {1.0, edge == EdgeMode::Periodic ? 1.0 : 0.0}, {0.0, 1.0});
}

TensorTrainOperator shift_mpo(std::size_t sites, int offset, EdgeMode edge) {
  return shift_mpo(QuanticsGrid::line(0.0, 1.0, static_cast<int>(sites)), 0, offset, edge);
}

TensorTrainOperator averaged_shift_mpo(std::size_t sites) {
  auto bit = [](int) {
    OpCore c(2, 2);
    fill_shift(c, 0, 1, true);
    return c;
  };
  return dimension_mpo(QuanticsGrid::line(0.0, 1.0, static_cast<int>(sites)), 0, bit, {0.5, 0.0}, {1.0, 1.0});
}

TensorTrainOperator pair_average_mpo(const QuanticsGrid& grid, int dim, EdgeMode edge) {
  auto bit = [](int) {
    OpCore c(2, 2);
    fill_shift(c, 0, 1, false);
    return c;
  };
  return dimension_mpo(grid, dim, bit, {0.5, edge == EdgeMode::Periodic ? 0.5 : 0.0}, {1.0, 1.0});
}

double magic_tensor(int z, int x, int y, int c, int c_in) {
  const int sum = x + y + c_in;
  return (z == sum % 2 && c == sum / 2) ? 1.0 : 0.0;
}

TensorTrain offset_train(std::size_t sites, const Stencil& stencil) {
  const int bits = static_cast<int>(sites);
  check_stencil(stencil, bits);
  std::optional<TensorTrain> acc;
  for (const auto& term : stencil) {
    std::vector<std::vector<double>> v;
    for (int level = 0; level < bits; ++level)
      v.push_back(offset_bit(term.offset, bits, level) ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0, 0.0});
    TensorTrain delta = scale(product_train(v), term.weight);
    acc = acc ? add(*acc, delta) : delta;
  }
  return *acc;
}

TensorTrainOperator multi_shift_mpo(const QuanticsGrid& grid, int dim, const Stencil& stencil, EdgeMode edge) {
  const int bits = grid.bits(dim);
  check_stencil(stencil, bits);
  const Index terms = static_cast<Index>(stencil.size());
  const Index k = 2 * terms;  // (carry, term)
  auto state = [terms](int carry, Index term) { return carry * terms + term; };
  auto bit = [&](int level) {
    OpCore core(k, k);
    for (Index t = 0; t < terms; ++t) {
      const int y = offset_bit(stencil[static_cast<std::size_t>(t)].offset, bits, level);
      for (int c = 0; c < 2; ++c)
        for (int cin = 0; cin < 2; ++cin)
          for (int x = 0; x < 2; ++x)
            for (int z = 0; z < 2; ++z)
              if (const double m = magic_tensor(z, x, y, c, cin); m != 0.0) core(state(c, t), x, z, state(cin, t)) = m;
    }
    return core;
  };
  std::vector<double> left(static_cast<std::size_t>(k), 0.0), right(static_cast<std::size_t>(k), 0.0);
  for (Index t = 0; t < terms; ++t) {
    const auto& term = stencil[static_cast<std::size_t>(t)];
    const int valid_carry = term.offset < 0 ? 1 : 0;
    for (int c = 0; c < 2; ++c)
      if (edge == EdgeMode::Periodic || c == valid_carry) left[static_cast<std::size_t>(state(c, t))] = term.weight;
    right[static_cast<std::size_t>(state(0, t))] = 1.0;
  }
  return dimension_mpo(grid, dim, bit, left, right);
}

TensorTrainOperator multi_shift_mpo(std::size_t sites, const Stencil& stencil, EdgeMode edge) {
  return multi_shift_mpo(QuanticsGrid::line(0.0, 1.0, static_cast<int>(sites)), 0, stencil, edge);
}

// ---------------------------------------------------------------------------- prolongation

std::pair<TensorTrain, QuanticsGrid> prolong_dim(const TensorTrain& tt, const QuanticsGrid& grid, int dim,
                                                 const ProlongationKind& kind, const TruncationPolicy& policy,
                                                 EdgeMode edge) {
  if (tt.size() != grid.total_bits()) throw ShapeError("prolong: train does not match grid");
  const QuanticsGrid fine = grid.with_bits(dim, +1);
  const std::size_t q = fine.site_of(dim, grid.bits(dim));
  const std::size_t n = tt.size();

  if (kind.type == ProlongationKind::Type::HighOrder) {
    const TensorTrain g = apply(multi_shift_mpo(grid, dim, kind.stencil, edge), tt);
    std::vector<Core> cores;
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == q) {
        const Index lf = q == 0 ? 1 : tt.core(q - 1).right();
        const Index lg = q == 0 ? 1 : g.core(q - 1).right();
        const bool at_front = q == 0;
        const bool at_back = q == n;
        const Index width = lf + lg;
        Core sel(at_front ? 1 : width, at_back ? 1 : width);
        if (at_front) {
          sel(0, 0, 0) = 1.0;
          sel(0, 1, 1) = 1.0;
        } else if (at_back) {
          sel(0, 0, 0) = 1.0;
          sel(1, 1, 0) = 1.0;
        } else {
          for (Index x = 0; x < lf; ++x) sel(x, 0, x) = 1.0;
          for (Index x = 0; x < lg; ++x) sel(lf + x, 1, lf + x) = 1.0;
        }
        cores.push_back(std::move(sel));
        continue;
      }
      const std::size_t old = i < q ? i : i - 1;
      const bool close_left = old == 0 && q != 0;
      const bool close_right = old == n - 1 && q != n;
      cores.push_back(block_core(tt.core(old), g.core(old), close_left, close_right));
    }
    TruncationPolicy p = policy;
    p.rel_tol = std::max(p.rel_tol, kHighOrderRelTol);
    return {truncate(TensorTrain(std::move(cores)), p).train, fine};
  }

  // Constant prolongation: new bit carries an identity core.
  std::vector<Core> cores;
  const auto bonds = tt.bond_dims();
  for (std::size_t i = 0; i <= n; ++i) {
    if (i == q) {
      const Index chi = bonds[q];
      Core c(chi, chi);
      for (Index k = 0; k < chi; ++k) c(k, 0, k) = c(k, 1, k) = 1.0;
      cores.push_back(std::move(c));
    } else {
      cores.push_back(tt.core(i < q ? i : i - 1));
    }
  }
  TensorTrain constant(std::move(cores));
  if (kind.type == ProlongationKind::Type::Constant) return {std::move(constant), fine};
  return {truncate(apply(pair_average_mpo(fine, dim, edge), constant), policy).train, fine};
}

std::pair<TensorTrain, QuanticsGrid> prolong(const TensorTrain& tt, const QuanticsGrid& grid,
                                             const ProlongationKind& kind, const TruncationPolicy& policy,
                                             const std::vector<EdgeMode>& edges) {
  std::pair<TensorTrain, QuanticsGrid> cur{tt, grid};
  for (int d = 0; d < grid.dims(); ++d) {
    const EdgeMode edge = edges.empty() ? EdgeMode::Open : edges.at(static_cast<std::size_t>(d));
    cur = prolong_dim(cur.first, cur.second, d, kind, policy, edge);
  }
  return cur;
}

}  // namespace qtt
