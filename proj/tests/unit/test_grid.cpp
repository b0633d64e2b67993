#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qtt/grid.hpp"

using namespace qtt;

TEST(Grid, HalfOpenCoordinates) {
  const auto g = QuanticsGrid::line(-1.0, 1.0, 4);
  EXPECT_DOUBLE_EQ(g.coordinate(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.125);
  EXPECT_DOUBLE_EQ(g.coordinate(0, 15), 1.0 - 0.125);
}

TEST(Grid, BitRoundTripAllOrderings) {
  const std::vector<QuanticsGrid> grids{
      QuanticsGrid({{0, 1}, {0, 2}, {0, 3}}, {3, 2, 4}),
      QuanticsGrid({{0, 1}, {0, 2}, {0, 3}}, {3, 2, 4}, BitOrdering::ScaleByScale),
      QuanticsGrid({{0, 1}, {0, 2}, {0, 3}}, {3, 2, 4}, BitOrdering::Interleaved, {{0, 2}, {1}}),
  };
  for (const auto& g : grids) {
    EXPECT_EQ(g.total_bits(), 9u);
    for (std::uint64_t x = 0; x < 8; ++x)
      for (std::uint64_t y = 0; y < 4; ++y)
        for (std::uint64_t z = 0; z < 16; z += 3) {
          const MultiIndex idx{x, y, z};
          EXPECT_EQ(bits_to_index(g, index_to_bits(g, idx)), idx);
        }
  }
}

TEST(Grid, InterleavedLayout) {
  const QuanticsGrid g({{0, 1}, {0, 1}, {0, 1}, {0, 1}}, {2, 2, 2, 2}, BitOrdering::Interleaved, {{0, 1}, {2, 3}});
  const std::vector<BitSlot> expect{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {3, 0}, {2, 1}, {3, 1}};
  EXPECT_EQ(g.layout(), expect);
  EXPECT_THROW(QuanticsGrid({{0, 1}, {0, 1}}, {2, 2}, BitOrdering::Interleaved, {{0}}), std::invalid_argument);
}

TEST(Grid, OutOfRangeIndexThrows) {
  const auto g = QuanticsGrid::line(0, 1, 3);
  EXPECT_THROW(index_to_bits(g, {8}), std::out_of_range);
}

TEST(Grid, DeltaHasSingleNonzero) {
  const QuanticsGrid g({{0, 1}, {0, 1}}, {3, 3});
  const auto d = to_dense(build_delta(g, {5, 2}));
  const auto bits = index_to_bits(g, {5, 2});
  std::size_t pos = 0;
  for (int b : bits) pos = 2 * pos + static_cast<std::size_t>(b);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d[i], i == pos ? 1.0 : 0.0);
}

TEST(Grid, SeparableAndDenseBuildsAgree) {
  const QuanticsGrid g({{0, 1}, {-1, 1}}, {4, 3}, BitOrdering::Interleaved, {{0, 1}});
  std::vector<double> tx(16), ty(8);
  for (std::uint64_t a = 0; a < 16; ++a) tx[a] = std::sin(g.coordinate(0, a));
  for (std::uint64_t a = 0; a < 8; ++a) ty[a] = std::exp(g.coordinate(1, a));
  const auto sep = build_separable(g, {tx, ty});
  FunctionAdaptor f([](std::span<const double> p) { return std::sin(p[0]) * std::exp(p[1]); });
  const auto den = build_dense(g, f);
  EXPECT_EQ(f.evaluations(), 128);
  EXPECT_LT((oracle::to_vec(to_dense(sep)) - oracle::to_vec(to_dense(den))).norm(), 1e-12);
  TruncationPolicy p;
  p.rel_tol = 1e-26;
  EXPECT_LE(truncate(sep, p).train.max_bond(), 2);
}
