#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qtt/operators.hpp"

using namespace qtt;

namespace {

oracle::Vec dense(const TensorTrain& tt) { return oracle::to_vec(to_dense(tt)); }
oracle::Mat dense(const TensorTrainOperator& op) { return to_dense(op); }

}  // namespace

TEST(Laplacian, OneDimensionalMatchesStencil) {
  const auto g = QuanticsGrid::line(0.0, 2.0, 5);
  const double h = g.spacing(0);
  for (auto kind : {BoundaryKind::DirichletZero, BoundaryKind::Periodic}) {
    const auto bc = BoundaryCondition::uniform(1, kind);
    const auto lap = laplacian_mpo(g, bc, 0);
    EXPECT_LE(lap.max_bond(), 3);
    EXPECT_LT((dense(lap) - oracle::laplacian_1d(32, h, kind == BoundaryKind::Periodic)).norm(), 1e-9);
  }
}

TEST(Laplacian, PeriodicRowSumsVanish) {
  const auto g = QuanticsGrid::line(0.0, 1.0, 6);
  const oracle::Mat m = dense(laplacian_mpo(g, BoundaryCondition::uniform(1, BoundaryKind::Periodic), 0));
  EXPECT_LT(m.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);
  const oracle::Mat d = dense(laplacian_mpo(g, BoundaryCondition::uniform(1, BoundaryKind::DirichletZero), 0));
  EXPECT_LT(d.rowwise().sum().segment(1, 62).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Laplacian, ExactOnQuadraticsInInterior) {
  const auto g = QuanticsGrid::line(0.0, 1.0, 6);
  std::vector<double> t(64);
  for (std::uint64_t a = 0; a < 64; ++a) t[a] = g.coordinate(0, a) * g.coordinate(0, a);
  const auto out = dense(apply(laplacian_mpo(g, BoundaryCondition::uniform(1, BoundaryKind::DirichletZero), 0), from_dense(t)));
  for (int a = 1; a < 63; ++a) EXPECT_NEAR(out(a), 2.0, 1e-7);
}

TEST(Laplacian, PeriodicCosineIsEigenfunction) {
  const int bits = 8;
  const auto g = QuanticsGrid::line(0.0, 1.0, bits);
  const double h = g.spacing(0);
  const auto c = sine_train(bits, std::numbers::pi / 2, 2 * std::numbers::pi * h);
  const auto out = dense(apply(laplacian_mpo(g, BoundaryCondition::uniform(1, BoundaryKind::Periodic), 0), c));
  const double lambda = -2.0 * (1.0 - std::cos(2 * std::numbers::pi * h)) / (h * h);
  EXPECT_LT((out - lambda * dense(c)).norm(), 1e-8 * std::abs(lambda) * dense(c).norm());
  EXPECT_NEAR(lambda / (-4 * std::numbers::pi * std::numbers::pi), 1.0, 1e-3);
}

TEST(Laplacian, MultiDimensionalEqualsKroneckerSum) {
  const QuanticsGrid g({{0, 1}, {0, 2}}, {3, 4});
  BoundaryCondition bc;
  bc.dims = {DimBoundary{BoundaryKind::Periodic}, DimBoundary{BoundaryKind::DirichletZero}};
  const auto lx = oracle::laplacian_1d(8, g.spacing(0), true);
  const auto ly = oracle::laplacian_1d(16, g.spacing(1), false);
  const auto k = kinetic_mpo(g, bc, {1.0, 0.5});
  const oracle::Mat want = -(oracle::kron(lx, oracle::eye(16)) + 0.5 * oracle::kron(oracle::eye(8), ly));
  EXPECT_LT((dense(k) - want).norm(), 1e-9 * want.norm());
  EXPECT_LT((dense(k) - dense(k).transpose()).norm(), 1e-9 * want.norm());
}

TEST(Laplacian, InterleavedActsOnCorrectDimension) {
  const QuanticsGrid g({{0, 1}, {0, 1}}, {3, 3}, BitOrdering::Interleaved, {{0, 1}});
  const auto bc = BoundaryCondition::uniform(2, BoundaryKind::DirichletZero);
  const auto lap = laplacian_mpo(g, bc, 1);
  const double inv = 1.0 / (g.spacing(1) * g.spacing(1));
  const auto out = apply(lap, build_delta(g, {2, 3}));
  for (std::uint64_t x = 0; x < 8; ++x)
    for (std::uint64_t y = 0; y < 8; ++y) {
      double want = 0.0;
      if (x == 2 && y == 3) want = -2 * inv;
      if (x == 2 && (y == 2 || y == 4)) want = inv;
      EXPECT_NEAR(evaluate(out, index_to_bits(g, {x, y})), want, 1e-9 * inv);
    }
}

TEST(DirichletRhs, ZeroDataGivesZero) {
  const QuanticsGrid g({{0, 1}, {0, 1}}, {3, 3});
  BoundaryCondition bc = BoundaryCondition::uniform(2, BoundaryKind::DirichletData);
  EXPECT_EQ(norm(dirichlet_rhs(g, bc)), 0.0);
}

TEST(DirichletRhs, CompletesTheFullLaplacian) {
  // Full stencil with ghost values equals interior operator plus rhs.
  const QuanticsGrid g({{-1, 1}, {0, 1}}, {4, 4});
  const std::size_t n = 16;
  std::vector<double> top(n);
  for (std::uint64_t a = 0; a < n; ++a) top[a] = std::abs(g.coordinate(0, a)) < 0.5 ? 1.0 : -1.0;
  BoundaryCondition bc;
  bc.dims.resize(2);
  bc.dims[0].kind = BoundaryKind::Periodic;
  bc.dims[1].kind = BoundaryKind::DirichletData;
  bc.dims[1].lower_value = 0.25;
  bc.dims[1].upper_face = from_dense(top);
  const auto rhs = dense(dirichlet_rhs(g, bc));
  const double hy = g.spacing(1);
  for (std::uint64_t x = 0; x < n; ++x)
    for (std::uint64_t y = 0; y < n; ++y) {
      double want = 0.0;
      if (y == 0) want += 0.25 / (hy * hy);
      if (y == n - 1) want += top[x] / (hy * hy);
      EXPECT_NEAR(rhs(static_cast<Eigen::Index>(x * n + y)), want, 1e-9 / (hy * hy));
    }
}

TEST(Diagonal, PointwiseProduct) {
  std::mt19937_64 rng(31);
  const auto v = random_train(5, 3, rng), f = random_train(5, 2, rng);
  EXPECT_LT((dense(apply(diagonal_mpo(v), f)) - dense(v).cwiseProduct(dense(f))).norm(), 1e-12 * dense(f).norm() * dense(v).norm());
  EXPECT_LT((dense(diagonal_mpo(constant_train(5, 1.0))) - oracle::eye(32)).norm(), 1e-14);
}

TEST(Hamiltonian, FreeParticleSpectrum) {
  const auto g = QuanticsGrid::line(0.0, 1.0, 6);
  HamiltonianSpec spec;
  spec.kinetic = {0.5};
  const oracle::Mat h = dense(assemble_hamiltonian(spec, g, BoundaryCondition::uniform(1, BoundaryKind::DirichletZero)));
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(h);
  // eigenvalues of the open 64-point chain: (1 - cos(k pi / 65)) / h^2
  const double hh = g.spacing(0);
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(es.eigenvalues()(k - 1), (1 - std::cos(k * std::numbers::pi / 65)) / (hh * hh), 1e-8);
}

TEST(Hamiltonian, HarmonicGroundStateAndPenalty) {
  const int bits = 9;
  const auto g = QuanticsGrid::line(-8.0, 8.0, bits);
  std::vector<double> v(g.points(0));
  for (std::uint64_t a = 0; a < v.size(); ++a) v[a] = 0.5 * g.coordinate(0, a) * g.coordinate(0, a);
  HamiltonianSpec spec;
  spec.kinetic = {0.5};
  spec.potential = from_dense(v);
  const auto bc = BoundaryCondition::uniform(1, BoundaryKind::DirichletZero);
  const oracle::Mat h = dense(assemble_hamiltonian(spec, g, bc));
  EXPECT_LT((h - h.transpose()).norm(), 1e-9 * h.norm());
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(h);
  EXPECT_NEAR(es.eigenvalues()(0), 0.5, 1e-3);
  EXPECT_NEAR(es.eigenvalues()(1), 1.5, 3e-3);

  const oracle::Vec ground = es.eigenvectors().col(0);
  spec.penalties.push_back({from_dense(std::vector<double>(ground.begin(), ground.end())), 1e3});
  const oracle::Mat hp = dense(assemble_hamiltonian(spec, g, bc, true));
  Eigen::SelfAdjointEigenSolver<oracle::Mat> ep(hp);
  EXPECT_LT(std::abs(ep.eigenvectors().col(0).dot(ground)), 1e-6);
  EXPECT_NEAR(ep.eigenvalues()(0), es.eigenvalues()(1), 1e-8);
}

TEST(ExternalField, SineAlongOneDimension) {
  const QuanticsGrid g({{-2, 2}, {0, 1}}, {4, 2});
  const auto f = external_field(g, 0, 0.3);
  EXPECT_LE(f.max_bond(), 2);
  for (std::uint64_t x = 0; x < 16; ++x)
    EXPECT_NEAR(evaluate(f, index_to_bits(g, {x, 1})), 0.3 * std::sin(std::numbers::pi / 2 * g.coordinate(0, x)), 1e-13);
}

TEST(Grid, DropDimensionKeepsOrdering) {
  const QuanticsGrid g({{0, 1}, {0, 2}, {0, 3}}, {2, 3, 2}, BitOrdering::Interleaved, {{0, 1}, {2}});
  const auto d = drop_dimension(g, 0);
  EXPECT_EQ(d.dims(), 2);
  EXPECT_EQ(d.bits(0), 3);
  EXPECT_EQ(d.total_bits(), 5u);
}
