#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "oracles.hpp"
#include "wlcm/wlcm.hpp"

using namespace wlcm;

namespace {

Matrix random_matrix(int n, int j, std::uint64_t seed) {
  RngHandle rng(seed);
  return Matrix::NullaryExpr(n, j, [&] { return rng.normal(0.0, 1.0); });
}

void expect_orthonormal(const Matrix& q) {
  Matrix g = q.transpose() * q - Matrix::Identity(q.cols(), q.cols());
  EXPECT_LE(g.cwiseAbs().maxCoeff(), 1e-8);
}

void expect_sign_convention(const TruncatedSvd& s) {
  for (Eigen::Index c = 0; c < s.v.cols(); ++c) {
    Eigen::Index arg;
    s.v.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_GE(s.v(arg, c), 0.0);
  }
}

}  // namespace

TEST(TopKSvd, Diagonal) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 3;
  m(1, 1) = 2;
  m(2, 2) = 1;
  auto s = top_k_svd(m, 2);
  EXPECT_NEAR(s.sigma(0), 3.0, 1e-12);
  EXPECT_NEAR(s.sigma(1), 2.0, 1e-12);
}

TEST(TopKSvd, MatchesJacobiOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Matrix m = random_matrix(20, 12, seed);
    auto s = top_k_svd(m, 5);
    auto ref = oracle::singular_values(m);
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(s.sigma(c), ref[c], 1e-8 * ref[c]);
    expect_orthonormal(s.u);
    expect_orthonormal(s.v);
    expect_sign_convention(s);
    for (int c = 0; c + 1 < 5; ++c) EXPECT_GE(s.sigma(c), s.sigma(c + 1));
  }
}

TEST(TopKSvd, WideInput) {
  Matrix m = random_matrix(9, 30, 3);
  auto s = top_k_svd(m, 4);
  auto ref = oracle::singular_values(m);
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(s.sigma(c), ref[c], 1e-8 * ref[c]);
  EXPECT_EQ(s.u.rows(), 9);
  EXPECT_EQ(s.v.rows(), 30);
}

TEST(TopKSvd, ExactLowRank) {
  RngHandle rng(12);
  auto inst = sample_instance(DistributionSpec::poisson(), 80, 20, 3, 5.0, rng);
  const Matrix& r0 = inst.r0.values;
  auto s = top_k_svd(r0, 3);
  EXPECT_LE((s.reconstruct() - r0).cwiseAbs().maxCoeff(), 1e-8 * r0.cwiseAbs().maxCoeff());
}

// Residual spectral norm equals sigma_{K+1}, on both the dense and the Lanczos path.
TEST(TopKSvd, EckartYoung) {
  struct Shape {
    int n, j, k;
  };
  for (auto sh : {Shape{30, 15, 3}, Shape{60, 40, 6}, Shape{260, 230, 4}, Shape{230, 600, 3}}) {
    Matrix m = random_matrix(sh.n, sh.j, static_cast<std::uint64_t>(sh.n * 7 + sh.j));
    // A planted low-rank signal keeps the spectrum gapped, as in the model.
    m += 5.0 * random_matrix(sh.n, sh.k, 1) * random_matrix(sh.k, sh.j, 2);
    auto s = top_k_svd(m, sh.k);
    auto ref = oracle::singular_values(m);
    double resid = oracle::spectral_norm(m - s.reconstruct());
    EXPECT_NEAR(resid, ref[sh.k], 1e-6 * ref[0]) << sh.n << "x" << sh.j;
    for (int c = 0; c < sh.k; ++c) EXPECT_NEAR(s.sigma(c), ref[c], 1e-8 * ref[0]);
    expect_orthonormal(s.u);
    expect_orthonormal(s.v);
  }
}

TEST(TopKSvd, NestedInK) {
  Matrix m = random_matrix(40, 25, 21);
  m += 4.0 * random_matrix(40, 5, 3) * random_matrix(5, 25, 4);
  auto big = top_k_svd(m, 5);
  auto small = top_k_svd(m, 2);
  EXPECT_LE((big.leading(2).reconstruct() - small.reconstruct()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(TopKSvd, Deterministic) {
  Matrix m = random_matrix(300, 250, 5);
  auto a = top_k_svd(m, 3);
  auto b = top_k_svd(m, 3);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.sigma, b.sigma);
  EXPECT_EQ(a.v, b.v);
}

TEST(TopKSvd, Errors) {
  Matrix m = random_matrix(5, 4, 1);
  EXPECT_THROW(top_k_svd(m, 5), Error);
  EXPECT_THROW(top_k_svd(m, 0), Error);
  m(2, 2) = std::nan("");
  try {
    top_k_svd(m, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
}

TEST(TopKSvd, ZeroMatrix) {
  auto s = top_k_svd(Matrix::Zero(6, 4), 2);
  EXPECT_EQ(s.sigma(0), 0.0);
  EXPECT_EQ(s.sigma(1), 0.0);
}

TEST(SpectralNorm, MatchesOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Matrix m = random_matrix(15, 9, seed);
    EXPECT_NEAR(spectral_norm(m), oracle::singular_values(m)[0], 1e-10);
    EXPECT_NEAR(spectral_norm(m.transpose()), oracle::singular_values(m)[0], 1e-10);
  }
}
