#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qtt/tci.hpp"

using namespace qtt;

namespace {

double max_error(const QuanticsGrid& g, const FunctionAdaptor& f, const TensorTrain& tt) {
  const auto exact = sample_dense(g, f);
  const auto approx = to_dense(tt);
  double err = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) err = std::max(err, std::abs(exact[i] - approx[i]));
  return err;
}

}  // namespace

TEST(Tci, ExponentialIsRankOne) {
  const auto g = QuanticsGrid::line(0.0, 4.0, 12);
  FunctionAdaptor f([](std::span<const double> x) { return std::exp(-x[0]); });
  const auto res = cross_interpolate(f, g, 10, 1e-12, 4);
  EXPECT_EQ(res.train.max_bond(), 1);
  EXPECT_LT(max_error(g, f, res.train), 1e-13);
  EXPECT_LT(res.state.pivot_error, 1e-12);
}

TEST(Tci, CosineIsRankTwo) {
  const auto g = QuanticsGrid::line(0.0, 2.0 * M_PI, 12);
  FunctionAdaptor f([](std::span<const double> x) { return std::cos(3.0 * x[0]); });
  const auto res = cross_interpolate(f, g, 10, 1e-12, 4);
  EXPECT_EQ(res.train.max_bond(), 2);
  EXPECT_LT(max_error(g, f, res.train), 1e-12);
}

TEST(Tci, InterpolatesAtPivots) {
  const QuanticsGrid g({{-1, 1}, {-1, 1}}, {5, 5}, BitOrdering::Interleaved, {{0, 1}});
  FunctionAdaptor f([](std::span<const double> x) { return 1.0 / (0.3 + x[0] * x[0] + 2.0 * x[1] * x[1]); });
  const auto res = cross_interpolate(f, g, 6, 0.0, 3);
  // every pivot pair (I_b ++ J_b) is reproduced exactly
  for (std::size_t b = 0; b < res.state.rows.size(); ++b)
    for (const auto& r : res.state.rows[b])
      for (const auto& c : res.state.cols[b]) {
        std::vector<int> bits(r);
        bits.insert(bits.end(), c.begin(), c.end());
        EXPECT_NEAR(evaluate(res.train, bits), f(bits_to_point(g, bits)), 1e-9 * res.state.max_abs);
      }
}

TEST(Tci, SmoothTwoDimensionalAccuracy) {
  const QuanticsGrid g({{-1, 1}, {-1, 1}}, {6, 6}, BitOrdering::Interleaved, {{0, 1}});
  FunctionAdaptor f([](std::span<const double> x) { return std::exp(-x[0] * x[0] - 0.5 * x[1]) * std::cos(2 * x[0] * x[1]); });
  const auto res = cross_interpolate(f, g, 40, 1e-12, 8);
  EXPECT_LT(max_error(g, f, res.train), 1e-9);
}

TEST(Tci, CoulombErrorFallsWithBond) {
  const QuanticsGrid g({{-25, 25}, {-25, 25}, {-25, 25}}, {6, 6, 6});
  const double h = g.spacing(0);
  FunctionAdaptor f([h](std::span<const double> x) {
    const double a = x[0] + 0.5 * h - 1.0, b = x[0] + 0.5 * h + 1.0, y = x[1] + 0.5 * h, z = x[2] + 0.5 * h;
    return -1.0 / std::sqrt(a * a + y * y + z * z) - 1.0 / std::sqrt(b * b + y * y + z * z);
  });
  const auto sweep = pivot_error_sweep(f, g, {8, 16, 32}, 6);
  for (std::size_t i = 1; i < sweep.size(); ++i) EXPECT_LT(sweep[i].second, sweep[i - 1].second);
}

TEST(Tci, RejectsNonFinite) {
  const auto g = QuanticsGrid::line(0.0, 1.0, 6);
  FunctionAdaptor f([](std::span<const double> x) { return 1.0 / (x[0] - 0.5); });
  try {
    cross_interpolate(f, g, 8, 1e-10, 3);
    FAIL() << "expected a domain error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
  }
}

TEST(Tci, ZeroAtOriginStillFindsStructure) {
  const auto g = QuanticsGrid::line(0.0, 1.0, 10);
  FunctionAdaptor f([](std::span<const double> x) { return x[0] * x[0]; });
  const auto res = cross_interpolate(f, g, 8, 1e-14, 4);
  EXPECT_LT(max_error(g, f, res.train), 1e-12);
  EXPECT_LE(res.train.max_bond(), 3);
}
