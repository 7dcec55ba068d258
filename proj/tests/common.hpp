#pragma once

#include <string>

#include "wlcm/wlcm.hpp"

namespace testutil {

// One spec per kind with the parameters used throughout the suite.
inline wlcm::DistributionSpec spec_for(wlcm::DistributionKind kind) {
  using wlcm::DistributionKind;
  using wlcm::DistributionSpec;
  switch (kind) {
    case DistributionKind::Binomial: return DistributionSpec::binomial(5);
    case DistributionKind::Normal: return DistributionSpec::normal(2.0);
    default: return DistributionSpec::make(kind);
  }
}

// A rho inside every kind's range that keeps instances informative.
inline double rho_for(wlcm::DistributionKind kind) {
  using wlcm::DistributionKind;
  switch (kind) {
    case DistributionKind::Bernoulli: return 0.9;
    case DistributionKind::Signed: return 0.9;
    case DistributionKind::Binomial: return 4.0;
    default: return 3.0;
  }
}

inline std::string name(wlcm::DistributionKind kind) { return std::string(wlcm::to_string(kind)); }

}  // namespace testutil
