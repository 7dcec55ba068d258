#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "oracles.hpp"
#include "wlcm/wlcm.hpp"

using namespace wlcm;

TEST(Ideal, ExactRecoveryEveryKind) {
  for (auto kind : kAllKinds) {
    auto spec = testutil::spec_for(kind);
    RngHandle rng(derive_seed(50, static_cast<std::uint64_t>(kind)));
    for (int trial = 0; trial < 5; ++trial) {
      auto inst = sample_instance(spec, 120, 24, 3, testutil::rho_for(kind), rng);
      for (auto m : {Method::SCK, Method::RMK}) {
        RngHandle mr(trial);
        auto est = m == Method::SCK ? ideal_sck(inst.r0, 3, mr) : ideal_rmk(inst.r0, 3, mr);
        EXPECT_EQ(clustering_error(inst.z, est.z_hat), 0.0) << testutil::name(kind);
        auto err = relative_theta_errors(inst.params.theta(), est.theta_hat);
        EXPECT_LE(err.rel_l2, 1e-8) << testutil::name(kind) << " " << to_string(m);
      }
    }
  }
}

TEST(Ideal, RejectsObservedMatrix) {
  RngHandle rng(1);
  auto inst = sample_instance(DistributionSpec::poisson(), 30, 10, 2, 2.0, rng);
  EXPECT_THROW(ideal_sck(inst.r, 2, rng), Error);
}

// Theta_hat from V Sigma U' Z (Z'Z)^-1 equals per-class row means of R_hat.
TEST(Sck, ThetaFormulaEqualsRowMeansOfRhat) {
  RngHandle rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = sample_instance(DistributionSpec::normal(1.0), 150, 30, 3, 1.0, rng);
    RngHandle a(trial), b(trial);
    auto est = sck(inst.r.values, 3, a);
    auto svd = top_k_svd(inst.r.values, 3);
    Matrix means = profile_means(svd.reconstruct(), est.z_hat);
    EXPECT_LE((means - est.theta_hat).cwiseAbs().maxCoeff(), 1e-12 * means.cwiseAbs().maxCoeff());
  }
}

TEST(Sck, PlantedDesignClassifiesPerfectly) {
  auto truth = planted_truth();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngHandle data(seed), m1(seed + 100), m2(seed + 100);
    auto r = sample_responses(population_matrix(truth.z, truth.params), DistributionSpec::normal(1.0), data);
    auto s = sck(r.values, 2, m1);
    auto k = rmk(r.values, 2, m2);
    for (const auto& est : {s, k}) {
      auto mv = evaluate(truth.z, est.z_hat, truth.params.theta(), est.theta_hat);
      EXPECT_EQ(mv.clustering_error, 0.0);
      EXPECT_EQ(mv.hamming_error, 0.0);
      EXPECT_EQ(mv.nmi, 1.0);
      EXPECT_EQ(mv.ari, 1.0);
      EXPECT_LT(mv.rel_l2, 0.02);
    }
  }
}

TEST(SckRmk, AgreeOnWellSeparatedInstance) {
  RngHandle rng(3);
  auto inst = sample_instance(DistributionSpec::normal(0.05), 200, 40, 3, 3.0, rng);
  RngHandle a(1), b(1);
  auto s = sck(inst.r.values, 3, a);
  auto k = rmk(inst.r.values, 3, b);
  EXPECT_EQ(hamming_error(s.z_hat, k.z_hat), 0.0);
  EXPECT_EQ(hamming_error(inst.z, s.z_hat), 0.0);
}

TEST(Estimators, InputValidation) {
  RngHandle rng(1);
  Matrix r = Matrix::Ones(5, 4);
  EXPECT_THROW(sck(r, 5, rng), Error);
  EXPECT_THROW(rmk(r, 0, rng), Error);
  r(0, 0) = std::numeric_limits<double>::infinity();
  try {
    rmk(r, 2, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
  EXPECT_EQ(parse_method("sck"), Method::SCK);
  EXPECT_THROW(parse_method("pca"), Error);
}

TEST(Estimators, ElapsedRecorded) {
  RngHandle rng(2);
  auto inst = sample_instance(DistributionSpec::bernoulli(), 200, 40, 3, 0.5, rng);
  auto est = estimate(Method::SCK, inst.r.values, 3, rng);
  EXPECT_GT(est.elapsed, 0.0);
  EXPECT_EQ(est.method, Method::SCK);
}

TEST(EstimateK, NoiselessReturnsTrueK) {
  for (auto kind : kAllKinds) {
    RngHandle rng(derive_seed(8, static_cast<std::uint64_t>(kind)));
    for (int k = 2; k <= 4; ++k) {
      auto inst = sample_instance(testutil::spec_for(kind), 150, 30, k, testutil::rho_for(kind), rng);
      auto sel = estimate_k(inst.r0.values, 8, rng);
      EXPECT_EQ(sel.k_hat, k) << testutil::name(kind);
      EXPECT_EQ(sel.scores.size(), 8u);
      EXPECT_LE(sel.scores[k - 1], 1e-8 * inst.r0.values.norm());
    }
  }
}

TEST(EstimateK, SingleCandidate) {
  RngHandle rng(1);
  auto inst = sample_instance(DistributionSpec::poisson(), 50, 10, 2, 2.0, rng);
  auto sel = estimate_k(inst.r.values, 1, rng);
  EXPECT_EQ(sel.k_hat, 1);
  EXPECT_EQ(sel.scores.size(), 1u);
}

TEST(EstimateK, ScoresAreResidualNorms) {
  RngHandle rng(4);
  auto inst = sample_instance(DistributionSpec::poisson(), 80, 20, 3, 4.0, rng);
  auto sel = estimate_k(inst.r.values, 4, rng);
  for (double s : sel.scores) EXPECT_GT(s, 0.0);
  double best = *std::min_element(sel.scores.begin(), sel.scores.end());
  EXPECT_NEAR(sel.scores[sel.k_hat - 1], best, 1e-9 * best);
}
