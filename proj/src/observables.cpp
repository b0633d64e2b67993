#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "qtt/problems.hpp"

namespace qtt {

Observables observables(const TensorTrain& psi, const TensorTrainOperator& kinetic, const TensorTrainOperator& potential) {
  const double n = inner(psi, psi);
  if (!(n > 0.0)) throw std::invalid_argument("observables: zero state");
  Observables o;
  o.kinetic = expectation(psi, kinetic, psi) / n;
  o.potential = expectation(psi, potential, psi) / n;
  o.energy = o.kinetic + o.potential;
  o.virial = o.potential / o.kinetic;
  return o;
}

TensorTrainOperator reflection_mpo(const QuanticsGrid& grid, const std::vector<int>& dims) {
  std::vector<OpCore> cores;
  for (std::size_t site = 0; site < grid.total_bits(); ++site) {
    const bool flip = std::find(dims.begin(), dims.end(), grid.slot(site).dim) != dims.end();
    OpCore c(1, 1);
    for (int s = 0; s < 2; ++s) c(0, flip ? 1 - s : s, s, 0) = 1.0;
    cores.push_back(std::move(c));
  }
  return TensorTrainOperator(std::move(cores));
}

double parity_overlap(const TensorTrain& psi, const QuanticsGrid& grid, const std::vector<int>& dims) {
  if (psi.size() != grid.total_bits()) throw ShapeError("parity_overlap: train does not match the grid");
  return expectation(psi, reflection_mpo(grid, dims), psi) / inner(psi, psi);
}

TensorTrain fix_dimensions(const TensorTrain& psi, const QuanticsGrid& grid, const std::vector<int>& dims,
                           const std::vector<std::uint64_t>& values) {
  if (psi.size() != grid.total_bits()) throw ShapeError("fix_dimensions: train does not match the grid");
  if (dims.size() != values.size()) throw std::invalid_argument("fix_dimensions: one value per fixed dimension");
  std::vector<Core> cores;
  RowMatrix carry = RowMatrix::Identity(1, 1);
  for (std::size_t site = 0; site < psi.size(); ++site) {
    const auto& slot = grid.slot(site);
    const auto it = std::find(dims.begin(), dims.end(), slot.dim);
    const Core& a = psi.core(site);
    if (it != dims.end()) {
      const auto v = values[static_cast<std::size_t>(it - dims.begin())];
      if (v >= grid.points(slot.dim)) throw std::out_of_range("fix_dimensions: index outside the grid");
      const int bit = static_cast<int>((v >> (grid.bits(slot.dim) - 1 - slot.level)) & 1U);
      carry = carry * a.slice(bit);
    } else {
      const RowMatrix m = carry * a.right_unfolding();
      cores.push_back(Core::from_right_unfolding(m));
      carry = RowMatrix::Identity(a.right(), a.right());
    }
  }
  if (cores.empty()) throw std::invalid_argument("fix_dimensions: no dimension left");
  if (carry.cols() != 1 || carry.rows() != 1) {
    const RowMatrix m = cores.back().left_unfolding() * carry;
    cores.back() = Core::from_left_unfolding(m);
  }
  return TensorTrain(std::move(cores));
}

std::vector<double> slice(const TensorTrain& psi, const QuanticsGrid& grid, int dim, const MultiIndex& at) {
  if (static_cast<int>(at.size()) != grid.dims()) throw std::invalid_argument("slice: one index per dimension");
  std::vector<int> dims;
  std::vector<std::uint64_t> values;
  for (int d = 0; d < grid.dims(); ++d)
    if (d != dim) {
      dims.push_back(d);
      values.push_back(at[static_cast<std::size_t>(d)]);
    }
  return to_dense(dims.empty() ? psi : fix_dimensions(psi, grid, dims, values));
}

std::vector<double> marginal_density(const TensorTrain& psi, const QuanticsGrid& grid, int dim) {
  const double total = inner(psi, psi);
  if (!(total > 0.0)) throw std::invalid_argument("marginal_density: zero state");
  std::vector<double> out(grid.points(dim));
  const double h = grid.spacing(dim);
  if (grid.dims() == 1) {
    const auto v = to_dense(psi);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = v[a] * v[a] / (total * h);
    return out;
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t a = 0; a < out.size(); ++a) {
    const TensorTrain f = fix_dimensions(psi, grid, {dim}, {a});
    out[a] = inner(f, f) / (total * h);
  }
  return out;
}

TensorTrain partial_density(const TensorTrain& psi, const QuanticsGrid& grid, const std::vector<int>& traced,
                            const TruncationPolicy& policy) {
  if (psi.size() != grid.total_bits()) throw ShapeError("partial_density: train does not match the grid");
  // sites of |psi|^2 carry the Kronecker square of each core
  auto square = [](const Core& a, int s) {
    const RowMatrix m = a.slice(s);
    RowMatrix k(m.rows() * m.rows(), m.cols() * m.cols());
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) k.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) = m(i, j) * m;
    return k;
  };
  std::vector<Core> cores;
  RowMatrix carry = RowMatrix::Identity(1, 1);
  for (std::size_t site = 0; site < psi.size(); ++site) {
    const Core& a = psi.core(site);
    const bool trace = std::find(traced.begin(), traced.end(), grid.slot(site).dim) != traced.end();
    if (trace) {
      carry = carry * (square(a, 0) + square(a, 1));
    } else {
      const RowMatrix m0 = carry * square(a, 0), m1 = carry * square(a, 1);
      Core c(m0.rows(), m0.cols());
      for (Index l = 0; l < m0.rows(); ++l)
        for (Index r = 0; r < m0.cols(); ++r) {
          c(l, 0, r) = m0(l, r);
          c(l, 1, r) = m1(l, r);
        }
      cores.push_back(std::move(c));
      carry = RowMatrix::Identity(m0.cols(), m0.cols());
    }
  }
  if (cores.empty()) throw std::invalid_argument("partial_density: every dimension traced");
  if (carry.rows() != 1 || carry.cols() != 1) {
    const RowMatrix m = cores.back().left_unfolding() * carry;
    cores.back() = Core::from_left_unfolding(m);
  }
  return truncate(TensorTrain(std::move(cores)), policy).train;
}

void write_slice(const std::string& path, const QuanticsGrid& grid, int dim, const std::vector<double>& values,
                 const std::string& quantity, int level) {
  if (values.size() != grid.points(dim)) throw std::invalid_argument("write_slice: value count does not match the axis");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_slice: cannot open " + path);
  os << "# quantity: " << quantity << '\n'
     << "# dimension: " << dim << '\n'
     << "# level: " << level << '\n'
     << "# ordering: " << to_string(grid.ordering()) << '\n'
     << "# bits:";
  for (int b : grid.bits()) os << ' ' << b;
  os << "\n# domain:";
  for (const auto& iv : grid.domain()) os << " [" << iv.lo << ',' << iv.hi << ')';
  os << "\ncoordinate,value\n" << std::setprecision(17);
  for (std::size_t a = 0; a < values.size(); ++a) os << grid.coordinate(dim, a) << ',' << values[a] << '\n';
}

SliceFile read_slice(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_slice: cannot open " + path);
  SliceFile out;
  std::string line;
  bool header_done = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# quantity: ";
      if (line.rfind(key, 0) == 0) out.quantity = line.substr(key.size());
      continue;
    }
    if (!header_done) {
      header_done = true;
      if (line == "coordinate,value") continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("read_slice: malformed line '" + line + "'");
    out.coordinates.push_back(std::stod(line.substr(0, comma)));
    out.values.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace qtt
