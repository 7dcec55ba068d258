#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace wlcm {

inline constexpr int kClassRetries = 100;

// Labels i.i.d. uniform on the K profiles, redrawn as a whole until no profile is empty.
inline ClassAssignment sample_classes(int n, int k, RngHandle& rng) {
  require(k >= 1, ErrorCode::InvalidArgument, "K must be >= 1");
  require(n >= k, ErrorCode::InvalidArgument, "need N >= K subjects");
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::vector<int> sizes(static_cast<std::size_t>(k));
  for (int attempt = 0; attempt <= kClassRetries; ++attempt) {
    std::fill(sizes.begin(), sizes.end(), 0);
    for (int& l : labels) {
      l = rng.below(k);
      ++sizes[static_cast<std::size_t>(l)];
    }
    if (std::find(sizes.begin(), sizes.end(), 0) == sizes.end())
      return ClassAssignment(std::move(labels), k);
  }
  throw Error(ErrorCode::RetriesExhausted,
              "no labelling with all " + std::to_string(k) + " profiles non-empty after " +
                  std::to_string(kClassRetries) + " resamples");
}

// B(j,k) ~ U[0,1] (U[-1,1] when negative means are legal), B /= max|B|, Theta = rho * B.
inline ItemParams sample_item_params(const DistributionSpec& spec, int j, int k, double rho,
                                     RngHandle& rng) {
  require(j >= 1 && k >= 1, ErrorCode::InvalidArgument, "J and K must be positive");
  require(spec.rho_domain().contains(rho), ErrorCode::RhoOutOfRange,
          "rho = " + std::to_string(rho) + " outside the legal range for " + spec.describe());
  const bool signed_b = spec.allows_negative_means();
  Matrix b(j, k);
  // Column-major fill order is part of the reproducibility contract.
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < j; ++r) b(r, c) = signed_b ? 2.0 * rng.uniform() - 1.0 : rng.uniform();
  double bmax = b.cwiseAbs().maxCoeff();
  require(bmax > 0.0, ErrorCode::AllZero, "sampled item matrix is zero");
  b /= bmax;
  auto params = ItemParams::from_scaled(rho, std::move(b));
  const auto domain = spec.mean_domain();
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < j; ++r)
      require(domain.contains(params.theta()(r, c)), ErrorCode::DomainViolation,
              "sampled Theta(" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                  ") outside the domain of " + spec.describe());
  return params;
}

// Draws R with E[R] = R0, entries independent, row-major draw order.
inline ResponseMatrix sample_responses(const ResponseMatrix& r0, const DistributionSpec& spec,
                                       RngHandle& rng) {
  const auto domain = spec.mean_domain();
  const int n = r0.n();
  const int jn = r0.j();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < jn; ++j)
      if (!domain.contains(r0.values(i, j)))
        throw Error(ErrorCode::DomainViolation,
                    "R0(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " +
                        std::to_string(r0.values(i, j)) + " is not a legal " +
                        std::string(to_string(spec.kind())) + " mean");

  Matrix r(n, jn);
  const double sd = spec.kind() == DistributionKind::Normal ? std::sqrt(spec.sigma2()) : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < jn; ++j) {
      const double mu = r0.values(i, j);
      double x = 0.0;
      switch (spec.kind()) {
        case DistributionKind::Bernoulli: x = rng.bernoulli(mu) ? 1.0 : 0.0; break;
        case DistributionKind::Binomial: {
          const double p = mu / spec.m();
          int successes = 0;
          for (int t = 0; t < spec.m(); ++t) successes += rng.bernoulli(p) ? 1 : 0;
          x = successes;
          break;
        }
        case DistributionKind::Poisson: x = static_cast<double>(rng.poisson(mu)); break;
        case DistributionKind::Normal: x = rng.normal(mu, sd); break;
        case DistributionKind::Exponential: x = rng.exponential(mu); break;
        case DistributionKind::Uniform: {
          // (0, 2 mu): reject the measure-zero endpoint 0.
          do {
            x = 2.0 * mu * rng.uniform();
          } while (x <= 0.0);
          break;
        }
        case DistributionKind::Signed: x = rng.bernoulli((1.0 + mu) / 2.0) ? 1.0 : -1.0; break;
      }
      r(i, j) = x;
    }
  }
  return {std::move(r), ResponseKind::Observed};
}

// One synthetic instance with its planted truth.
struct PlantedInstance {
  ClassAssignment z;
  ItemParams params;
  ResponseMatrix r0;
  ResponseMatrix r;
};

inline PlantedInstance sample_instance(const DistributionSpec& spec, int n, int j, int k,
                                       double rho, RngHandle& rng) {
  auto z = sample_classes(n, k, rng);
  auto params = sample_item_params(spec, j, k, rho, rng);
  require_full_column_rank(params.theta());
  auto r0 = population_matrix(z, params);
  auto r = sample_responses(r0, spec, rng);
  return {std::move(z), std::move(params), std::move(r0), std::move(r)};
}

}  // namespace wlcm
