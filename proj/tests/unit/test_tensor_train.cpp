#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "qtt/tensor_train.hpp"

using namespace qtt;

namespace {

oracle::Vec dense(const TensorTrain& tt) { return oracle::to_vec(to_dense(tt)); }

}  // namespace

TEST(TensorTrain, RejectsMismatchedBonds) {
  std::vector<Core> cores{Core(1, 2), Core(3, 1)};
  EXPECT_THROW(TensorTrain{std::move(cores)}, ShapeError);
  std::vector<Core> open{Core(2, 1)};
  EXPECT_THROW(TensorTrain{std::move(open)}, ShapeError);
}

TEST(TensorTrain, DenseRoundTripIsExact) {
  std::mt19937_64 rng(1);
  const auto v = oracle::random_vec(1 << 9, rng);
  const auto tt = from_dense(std::vector<double>(v.begin(), v.end()));
  EXPECT_LT((dense(tt) - v).norm(), 1e-12 * v.norm());
  EXPECT_EQ(tt.size(), 9u);
  EXPECT_EQ(tt.bond_dims().front(), 1);
  EXPECT_EQ(tt.bond_dims().back(), 1);
}

TEST(TensorTrain, EvaluateMatchesDenseEntries) {
  std::mt19937_64 rng(2);
  const auto tt = random_train(7, 4, rng);
  const auto v = dense(tt);
  for (int k : {0, 5, 77, 127}) {
    std::vector<int> bits(7);
    for (int i = 0; i < 7; ++i) bits[static_cast<std::size_t>(i)] = (k >> (6 - i)) & 1;
    EXPECT_NEAR(evaluate(tt, bits), v(k), 1e-12);
  }
}

TEST(TensorTrain, AddScaleInnerNorm) {
  std::mt19937_64 rng(3);
  const auto a = random_train(8, 3, rng);
  const auto b = random_train(8, 5, rng);
  const auto va = dense(a), vb = dense(b);
  EXPECT_LT((dense(add(a, b, 2.0, -0.5)) - (2.0 * va - 0.5 * vb)).norm(), 1e-12 * va.norm());
  EXPECT_NEAR(inner(a, b), va.dot(vb), 1e-10 * va.norm() * vb.norm());
  EXPECT_NEAR(norm(a), va.norm(), 1e-12 * va.norm());
  EXPECT_LT((dense(scale(a, -3.0)) + 3.0 * va).norm(), 1e-12 * va.norm());
}

TEST(TensorTrain, CanonicalizePreservesValues) {
  std::mt19937_64 rng(4);
  const auto a = random_train(8, 4, rng);
  for (std::size_t c : {0u, 3u, 7u}) {
    const auto b = canonicalize(a, c);
    EXPECT_EQ(b.canonical_center(), c);
    EXPECT_LT((dense(b) - dense(a)).norm(), 1e-12 * norm(a));
  }
}

TEST(TensorTrain, TruncationErrorEqualsDiscardedWeight) {
  std::mt19937_64 rng(5);
  const auto a = random_train(10, 8, rng);
  TruncationPolicy p;
  p.max_bond = 3;
  const auto r = truncate(a, p);
  EXPECT_LE(r.train.max_bond(), 3);
  const double err2 = (dense(r.train) - dense(a)).squaredNorm() / dense(a).squaredNorm();
  EXPECT_NEAR(err2, r.discarded_weight, 1e-10);
  EXPECT_GT(r.discarded_weight, 0.0);
}

TEST(TensorTrain, RelativeToleranceBoundsError) {
  std::mt19937_64 rng(6);
  const auto a = random_train(10, 8, rng);
  TruncationPolicy p;
  p.rel_tol = 1e-3;
  const auto r = truncate(a, p);
  EXPECT_LE(r.discarded_weight, 1e-3 * 10);
  const double err2 = (dense(r.train) - dense(a)).squaredNorm() / dense(a).squaredNorm();
  EXPECT_NEAR(err2, r.discarded_weight, 1e-10);
}

TEST(TensorTrain, ChooseCutKeepsMinimalRank) {
  Vector s(4);
  s << 4.0, 2.0, 1.0, 0.5;
  TruncationPolicy p;
  p.rel_tol = 0.25 / 21.25 + 1e-12;
  EXPECT_EQ(choose_cut(s, p).keep, 3);
  p.rel_tol = 0.0;
  p.max_bond = 2;
  const auto d = choose_cut(s, p);
  EXPECT_EQ(d.keep, 2);
  EXPECT_NEAR(d.discarded, 1.25, 1e-14);
}

TEST(TensorTrain, ZeroInputGivesCanonicalZero) {
  const auto z = truncate(scale(constant_train(6, 1.0), 0.0), TruncationPolicy{});
  EXPECT_EQ(z.train.max_bond(), 1);
  EXPECT_EQ(z.discarded_weight, 0.0);
  EXPECT_EQ(norm(z.train), 0.0);
}

TEST(TensorTrain, InvalidPolicyRejected) {
  TruncationPolicy p;
  p.rel_tol = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.rel_tol = 0.0;
  p.max_bond = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(TensorTrainOperator, ApplyComposeAddMatchDense) {
  std::mt19937_64 rng(7);
  const auto A = random_operator(6, 3, rng);
  const auto B = random_operator(6, 2, rng);
  const auto x = random_train(6, 3, rng);
  const oracle::Mat da = to_dense(A), db = to_dense(B);
  const auto vx = dense(x);
  EXPECT_LT((dense(apply(A, x)) - da * vx).norm(), 1e-10 * (da * vx).norm());
  EXPECT_LT((oracle::Mat(to_dense(compose(A, B))) - da * db).norm(), 1e-10 * (da * db).norm());
  EXPECT_LT((oracle::Mat(to_dense(add(A, B, 1.0, -2.0))) - (da - 2.0 * db)).norm(), 1e-10 * da.norm());
  EXPECT_NEAR(expectation(x, A, x), vx.dot(da * vx), 1e-9 * std::abs(vx.dot(da * vx)) + 1e-12);
  const auto I = identity_operator(6);
  EXPECT_LT((oracle::Mat(to_dense(I)) - oracle::eye(64)).norm(), 1e-14);
}

TEST(TensorTrainOperator, CompressKeepsOperator) {
  std::mt19937_64 rng(8);
  const auto A = random_operator(5, 2, rng);
  const auto doubled = add(A, A);
  const auto c = compress(doubled, 1e-14);
  EXPECT_LE(c.max_bond(), A.max_bond());
  EXPECT_LT((oracle::Mat(to_dense(c)) - 2.0 * oracle::Mat(to_dense(A))).norm(), 1e-10 * oracle::Mat(to_dense(A)).norm());
}

TEST(TensorTrain, BinaryRoundTrip) {
  std::mt19937_64 rng(9);
  const auto a = random_train(9, 5, rng);
  std::stringstream ss;
  write_binary(ss, a);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 4), "QTT1");
  const auto b = read_binary(ss);
  ASSERT_EQ(b.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = a.core(i).data(), y = b.core(i).data();
    ASSERT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end()));
  }
  std::stringstream bad("QTT2");
  EXPECT_THROW(read_binary(bad), std::runtime_error);
}

TEST(TensorTrain, DenseCapEnforced) {
  EXPECT_THROW(to_dense(constant_train(dense_cap() + 1, 1.0)), std::length_error);
}
