#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "types.hpp"

namespace wlcm {

enum class DistributionKind { Bernoulli, Binomial, Poisson, Normal, Exponential, Uniform, Signed };

inline constexpr std::array<DistributionKind, 7> kAllKinds = {
    DistributionKind::Bernoulli, DistributionKind::Binomial,    DistributionKind::Poisson,
    DistributionKind::Normal,    DistributionKind::Exponential, DistributionKind::Uniform,
    DistributionKind::Signed};

inline std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Bernoulli: return "bernoulli";
    case DistributionKind::Binomial: return "binomial";
    case DistributionKind::Poisson: return "poisson";
    case DistributionKind::Normal: return "normal";
    case DistributionKind::Exponential: return "exponential";
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::Signed: return "signed";
  }
  return "unknown";
}

inline DistributionKind parse_kind(std::string_view name) {
  for (auto kind : kAllKinds)
    if (to_string(kind) == name) return kind;
  throw Error(ErrorCode::InvalidArgument, "unknown distribution '" + std::string(name) + "'");
}

// An interval with optionally open ends; infinite ends are always open.
struct Interval {
  double lo;
  double hi;
  bool lo_open;
  bool hi_open;

  bool contains(double x) const {
    if (std::isnan(x)) return false;
    bool above = lo_open ? x > lo : x >= lo;
    bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }
};

// Which distribution generates R from R0, with its kind-specific parameters.
class DistributionSpec {
 public:
  static DistributionSpec bernoulli() { return DistributionSpec(DistributionKind::Bernoulli); }
  static DistributionSpec binomial(int m) {
    require(m >= 1, ErrorCode::InvalidArgument, "binomial trials m must be >= 1");
    DistributionSpec s(DistributionKind::Binomial);
    s.m_ = m;
    return s;
  }
  static DistributionSpec poisson() { return DistributionSpec(DistributionKind::Poisson); }
  static DistributionSpec normal(double sigma2) {
    require(sigma2 > 0 && std::isfinite(sigma2), ErrorCode::InvalidArgument,
            "normal variance must be positive");
    DistributionSpec s(DistributionKind::Normal);
    s.sigma2_ = sigma2;
    return s;
  }
  static DistributionSpec exponential() { return DistributionSpec(DistributionKind::Exponential); }
  static DistributionSpec uniform() { return DistributionSpec(DistributionKind::Uniform); }
  static DistributionSpec signed_pm1() { return DistributionSpec(DistributionKind::Signed); }

  // Builds a spec from a kind plus optional parameters; rejects parameters the kind does not take.
  static DistributionSpec make(DistributionKind kind, std::optional<int> m = std::nullopt,
                               std::optional<double> sigma2 = std::nullopt) {
    if (kind != DistributionKind::Binomial && m)
      throw Error(ErrorCode::InvalidArgument, "parameter m only applies to binomial");
    if (kind != DistributionKind::Normal && sigma2)
      throw Error(ErrorCode::InvalidArgument, "parameter sigma2 only applies to normal");
    switch (kind) {
      case DistributionKind::Binomial:
        require(m.has_value(), ErrorCode::InvalidArgument, "binomial requires m");
        return binomial(*m);
      case DistributionKind::Normal:
        require(sigma2.has_value(), ErrorCode::InvalidArgument, "normal requires sigma2");
        return normal(*sigma2);
      default:
        return DistributionSpec(kind);
    }
  }

  DistributionKind kind() const { return kind_; }
  int m() const { return m_; }
  double sigma2() const { return sigma2_; }

  // Legal range of each R0 entry.
  Interval mean_domain() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
      case DistributionKind::Bernoulli: return {0.0, 1.0, false, false};
      case DistributionKind::Binomial: return {0.0, double(m_), false, false};
      case DistributionKind::Poisson: return {0.0, inf, false, true};
      case DistributionKind::Normal: return {-inf, inf, true, true};
      case DistributionKind::Exponential: return {0.0, inf, true, true};
      case DistributionKind::Uniform: return {0.0, inf, true, true};
      case DistributionKind::Signed: return {-1.0, 1.0, false, false};
    }
    return {-inf, inf, true, true};
  }

  // Legal range of the scaling parameter rho.
  Interval rho_domain() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
      case DistributionKind::Bernoulli:
      case DistributionKind::Signed: return {0.0, 1.0, true, false};
      case DistributionKind::Binomial: return {0.0, double(m_), true, false};
      default: return {0.0, inf, true, true};
    }
  }

  // Normal and signed responses admit negative item parameters.
  bool allows_negative_means() const {
    return kind_ == DistributionKind::Normal || kind_ == DistributionKind::Signed;
  }

  // Variance of a single response with mean r0.
  double variance(double r0) const {
    switch (kind_) {
      case DistributionKind::Bernoulli: return r0 * (1.0 - r0);
      case DistributionKind::Binomial: return r0 * (1.0 - r0 / m_);
      case DistributionKind::Poisson: return r0;
      case DistributionKind::Normal: return sigma2_;
      case DistributionKind::Exponential: return r0 * r0;
      case DistributionKind::Uniform: return (2.0 * r0) * (2.0 * r0) / 12.0;
      case DistributionKind::Signed: return 1.0 - r0 * r0;
    }
    return 0.0;
  }

  std::string describe() const {
    std::string out(to_string(kind_));
    if (kind_ == DistributionKind::Binomial) out += "(m=" + std::to_string(m_) + ")";
    if (kind_ == DistributionKind::Normal) out += "(sigma2=" + std::to_string(sigma2_) + ")";
    return out;
  }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;

 private:
  explicit DistributionSpec(DistributionKind kind) : kind_(kind) {}

  DistributionKind kind_;
  int m_ = 0;
  double sigma2_ = 0.0;
};

}  // namespace wlcm
