#include "qtt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qtt {

std::string to_string(BitOrdering ordering) {
  switch (ordering) {
    case BitOrdering::Sequential: return "sequential";
    case BitOrdering::Interleaved: return "interleaved";
    case BitOrdering::ScaleByScale: return "scale-by-scale";
  }
  return "sequential";
}

BitOrdering ordering_from_string(const std::string& name) {
  if (name == "sequential") return BitOrdering::Sequential;
  if (name == "interleaved") return BitOrdering::Interleaved;
  if (name == "scale-by-scale") return BitOrdering::ScaleByScale;
  throw std::invalid_argument("unknown bit ordering '" + name + "'");
}

QuanticsGrid::QuanticsGrid(std::vector<Interval> domain, std::vector<int> bits, BitOrdering ordering,
                           std::vector<std::vector<int>> groups)
    : domain_(std::move(domain)), bits_(std::move(bits)), ordering_(ordering), groups_(std::move(groups)) {
  if (domain_.empty() || domain_.size() != bits_.size())
    throw std::invalid_argument("QuanticsGrid: need one interval and one bit count per dimension");
  if (domain_.size() > 4) throw std::invalid_argument("QuanticsGrid: at most 4 dimensions");
  for (std::size_t d = 0; d < bits_.size(); ++d) {
    if (bits_[d] < 1 || bits_[d] > 62) throw std::invalid_argument("QuanticsGrid: bits per dimension must be in [1, 62]");
    if (!(domain_[d].hi > domain_[d].lo)) throw std::invalid_argument("QuanticsGrid: empty interval");
  }
  const int d = static_cast<int>(domain_.size());
  switch (ordering_) {
    case BitOrdering::Sequential:
      groups_.clear();
      for (int i = 0; i < d; ++i) groups_.push_back({i});
      break;
    case BitOrdering::ScaleByScale:
      groups_.assign(1, {});
      for (int i = 0; i < d; ++i) groups_[0].push_back(i);
      break;
    case BitOrdering::Interleaved: {
      if (groups_.empty()) throw std::invalid_argument("QuanticsGrid: interleaved ordering needs dimension groups");
      std::vector<int> seen;
      for (const auto& g : groups_) seen.insert(seen.end(), g.begin(), g.end());
      std::sort(seen.begin(), seen.end());
      std::vector<int> expected(static_cast<std::size_t>(d));
      std::iota(expected.begin(), expected.end(), 0);
      if (seen != expected) throw std::invalid_argument("QuanticsGrid: groups must partition the dimensions");
      break;
    }
  }
  build_layout();
}

QuanticsGrid QuanticsGrid::line(double lo, double hi, int bits) { return QuanticsGrid({{lo, hi}}, {bits}); }

void QuanticsGrid::build_layout() {
  layout_.clear();
  for (const auto& g : groups_) {
    int depth = 0;
    for (int dim : g) depth = std::max(depth, bits_[static_cast<std::size_t>(dim)]);
    for (int level = 0; level < depth; ++level)
      for (int dim : g)
        if (level < bits_[static_cast<std::size_t>(dim)]) layout_.push_back({dim, level});
  }
}

double QuanticsGrid::spacing(int dim) const { return domain(dim).width() / std::ldexp(1.0, bits(dim)); }

double QuanticsGrid::coordinate(int dim, std::uint64_t index) const {
  return domain(dim).lo + static_cast<double>(index) * spacing(dim);
}

double QuanticsGrid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dims(); ++d) v *= spacing(d);
  return v;
}

std::size_t QuanticsGrid::site_of(int dim, int level) const {
  const BitSlot want{dim, level};
  const auto it = std::find(layout_.begin(), layout_.end(), want);
  if (it == layout_.end()) throw std::out_of_range("QuanticsGrid: no such bit slot");
  return static_cast<std::size_t>(it - layout_.begin());
}

QuanticsGrid QuanticsGrid::with_bits(int dim, int delta) const {
  auto b = bits_;
  b.at(static_cast<std::size_t>(dim)) += delta;
  return QuanticsGrid(domain_, b, ordering_, groups_);
}

QuanticsGrid QuanticsGrid::with_domain(int dim, Interval iv) const {
  auto dom = domain_;
  dom.at(static_cast<std::size_t>(dim)) = iv;
  return QuanticsGrid(dom, bits_, ordering_, groups_);
}

bool QuanticsGrid::operator==(const QuanticsGrid& o) const {
  if (bits_ != o.bits_ || layout_ != o.layout_ || domain_.size() != o.domain_.size()) return false;
  for (std::size_t d = 0; d < domain_.size(); ++d)
    if (domain_[d].lo != o.domain_[d].lo || domain_[d].hi != o.domain_[d].hi) return false;
  return true;
}

std::vector<int> index_to_bits(const QuanticsGrid& grid, const MultiIndex& index) {
  if (static_cast<int>(index.size()) != grid.dims()) throw std::invalid_argument("index_to_bits: wrong arity");
  for (int d = 0; d < grid.dims(); ++d)
    if (index[static_cast<std::size_t>(d)] >= grid.points(d))
      throw std::out_of_range("index_to_bits: index " + std::to_string(index[static_cast<std::size_t>(d)]) +
                              " out of range in dimension " + std::to_string(d));
  std::vector<int> bits(grid.total_bits());
  for (std::size_t site = 0; site < bits.size(); ++site) {
    const auto& s = grid.slot(site);
    const int shift = grid.bits(s.dim) - 1 - s.level;
    bits[site] = static_cast<int>((index[static_cast<std::size_t>(s.dim)] >> shift) & 1U);
  }
  return bits;
}

MultiIndex bits_to_index(const QuanticsGrid& grid, std::span<const int> bits) {
  if (bits.size() != grid.total_bits()) throw std::invalid_argument("bits_to_index: length mismatch");
  MultiIndex index(static_cast<std::size_t>(grid.dims()), 0);
  for (std::size_t site = 0; site < bits.size(); ++site) {
    const auto& s = grid.slot(site);
    const int shift = grid.bits(s.dim) - 1 - s.level;
    if (bits[site]) index[static_cast<std::size_t>(s.dim)] |= std::uint64_t{1} << shift;
  }
  return index;
}

std::vector<double> index_to_point(const QuanticsGrid& grid, const MultiIndex& index) {
  std::vector<double> x(index.size());
  for (int d = 0; d < grid.dims(); ++d) x[static_cast<std::size_t>(d)] = grid.coordinate(d, index[static_cast<std::size_t>(d)]);
  return x;
}

std::vector<double> bits_to_point(const QuanticsGrid& grid, std::span<const int> bits) {
  return index_to_point(grid, bits_to_index(grid, bits));
}

TensorTrain build_delta(const QuanticsGrid& grid, const MultiIndex& index) {
  const auto bits = index_to_bits(grid, index);
  std::vector<std::vector<double>> v;
  for (int b : bits) v.push_back(b ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0, 0.0});
  return product_train(v);
}

TensorTrain hadamard(const TensorTrain& a, const TensorTrain& b) {
  if (a.size() != b.size()) throw ShapeError("hadamard: length mismatch");
  std::vector<Core> cores;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Core& ca = a.core(i);
    const Core& cb = b.core(i);
    Core c(ca.left() * cb.left(), ca.right() * cb.right());
    for (Index x = 0; x < ca.left(); ++x)
      for (Index y = 0; y < cb.left(); ++y)
        for (int s = 0; s < 2; ++s)
          for (Index u = 0; u < ca.right(); ++u)
            for (Index v = 0; v < cb.right(); ++v) c(x * cb.left() + y, s, u * cb.right() + v) = ca(x, s, u) * cb(y, s, v);
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain sine_train(int bits, double phase, double step) {
  if (bits < 1) throw std::invalid_argument("sine_train: need at least one bit");
  // row vector (cos phi, sin phi) times rotation R(theta) advances phi by theta
  std::vector<Core> cores;
  for (int level = 0; level < bits; ++level) {
    const double theta = step * std::ldexp(1.0, bits - 1 - level);
    const Index l = level == 0 ? 1 : 2;
    const Index r = level == bits - 1 ? 1 : 2;
    Core c(l, r);
    for (int s = 0; s < 2; ++s) {
      const double ct = std::cos(s * theta), st = std::sin(s * theta);
      RowMatrix rot(2, 2);
      rot << ct, st, -st, ct;
      RowMatrix m = rot;
      if (level == 0) {
        RowMatrix start(1, 2);
        start << std::cos(phase), std::sin(phase);
        m = start * m;
      }
      if (level == bits - 1) m = m.col(1).eval();
      for (Index a = 0; a < l; ++a)
        for (Index b = 0; b < r; ++b) c(a, s, b) = m(a, b);
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain embed_dimension(const QuanticsGrid& grid, int dim, const TensorTrain& factor) {
  if (static_cast<int>(factor.size()) != grid.bits(dim)) throw ShapeError("embed_dimension: factor length mismatch");
  std::vector<Core> cores;
  Index bond = 1;
  for (std::size_t site = 0; site < grid.total_bits(); ++site) {
    const auto& s = grid.slot(site);
    if (s.dim == dim) {
      cores.push_back(factor.core(static_cast<std::size_t>(s.level)));
      bond = cores.back().right();
    } else {
      Core c(bond, bond);
      for (Index k = 0; k < bond; ++k) c(k, 0, k) = c(k, 1, k) = 1.0;
      cores.push_back(std::move(c));
    }
  }
  return TensorTrain(std::move(cores));
}

TensorTrain build_separable(const QuanticsGrid& grid, const std::vector<std::vector<double>>& tables) {
  if (static_cast<int>(tables.size()) != grid.dims()) throw std::invalid_argument("build_separable: one table per dimension");
  std::optional<TensorTrain> acc;
  for (int d = 0; d < grid.dims(); ++d) {
    const auto& t = tables[static_cast<std::size_t>(d)];
    if (t.size() != grid.points(d)) throw std::invalid_argument("build_separable: table length must be 2^bits");
    TensorTrain factor = grid.bits(d) == 0 ? constant_train(1, 1.0) : from_dense(t);
    TensorTrain e = embed_dimension(grid, d, factor);
    acc = acc ? hadamard(*acc, e) : e;
  }
  return *acc;
}

std::vector<double> sample_dense(const QuanticsGrid& grid, const FunctionAdaptor& f) {
  const std::size_t n = grid.total_bits();
  if (n > dense_cap()) throw std::length_error("sample_dense: exceeds dense cap");
  std::vector<double> values(std::size_t{1} << n);
  std::vector<int> bits(n);
  for (std::size_t k = 0; k < values.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<int>((k >> (n - 1 - i)) & 1U);
    values[k] = f(bits_to_point(grid, bits));
  }
  return values;
}

TensorTrain build_dense(const QuanticsGrid& grid, const FunctionAdaptor& f, const TruncationPolicy& policy) {
  return from_dense(sample_dense(grid, f), policy);
}

}  // namespace qtt
