#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "types.hpp"

namespace wlcm {

// Membership of N subjects in K latent profiles.
//
// Labels are 0-based (0..K-1) everywhere inside the library; reports and
// files use 1-based labels. Use from_one_based()/one_based() at that boundary.
// Every profile holds at least one subject.
class ClassAssignment {
 public:
  ClassAssignment(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
    require(k_ >= 1, ErrorCode::InvalidArgument, "K must be >= 1");
    sizes_.assign(static_cast<std::size_t>(k_), 0);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      int l = labels_[i];
      require(l >= 0 && l < k_, ErrorCode::InvalidArgument,
              "label of subject " + std::to_string(i + 1) + " out of range");
      ++sizes_[static_cast<std::size_t>(l)];
    }
    for (int c = 0; c < k_; ++c)
      require(sizes_[static_cast<std::size_t>(c)] > 0, ErrorCode::EmptyClass,
              "profile " + std::to_string(c + 1) + " has no subjects");
  }

  static ClassAssignment from_one_based(std::span<const int> labels, int k) {
    std::vector<int> zero(labels.begin(), labels.end());
    for (int& l : zero) --l;
    return ClassAssignment(std::move(zero), k);
  }

  int n() const { return static_cast<int>(labels_.size()); }
  int k() const { return k_; }
  int label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& sizes() const { return sizes_; }
  int size_of(int c) const { return sizes_[static_cast<std::size_t>(c)]; }
  int min_size() const { return *std::min_element(sizes_.begin(), sizes_.end()); }
  int max_size() const { return *std::max_element(sizes_.begin(), sizes_.end()); }

  std::vector<int> one_based() const {
    std::vector<int> out(labels_);
    for (int& l : out) ++l;
    return out;
  }

  // The N x K one-hot classification matrix Z.
  Matrix matrix() const {
    Matrix z = Matrix::Zero(n(), k_);
    for (int i = 0; i < n(); ++i) z(i, label(i)) = 1.0;
    return z;
  }

  friend bool operator==(const ClassAssignment&, const ClassAssignment&) = default;

 private:
  std::vector<int> labels_;
  int k_;
  std::vector<int> sizes_;
};

// Validates 0-based labels and materializes Z. Fails with EmptyClass when a profile is unused.
inline ClassAssignment one_hot(std::span<const int> labels, int k) {
  return ClassAssignment(std::vector<int>(labels.begin(), labels.end()), k);
}

struct ScalingSplit {
  double rho;
  Matrix b;
};

// rho = max |theta|, b = theta / rho.
inline ScalingSplit scaling_split(const Matrix& theta) {
  require(theta.size() > 0, ErrorCode::AllZero, "empty item parameter matrix");
  require(theta.allFinite(), ErrorCode::NonFinite, "item parameters must be finite");
  double rho = theta.cwiseAbs().maxCoeff();
  require(rho > 0.0, ErrorCode::AllZero, "item parameter matrix is identically zero");
  return {rho, theta / rho};
}

// Item parameter matrix Theta (J x K) with its split Theta = rho * B, max|B| = 1.
class ItemParams {
 public:
  explicit ItemParams(Matrix theta) : theta_(std::move(theta)) {
    auto split = scaling_split(theta_);
    rho_ = split.rho;
    b_ = std::move(split.b);
  }

  // Builds Theta = rho * b from a normalized matrix; b must already satisfy max|b| = 1.
  static ItemParams from_scaled(double rho, Matrix b) {
    require(rho > 0.0 && std::isfinite(rho), ErrorCode::InvalidArgument, "rho must be positive");
    require(b.size() > 0 && b.cwiseAbs().maxCoeff() == 1.0, ErrorCode::InvalidArgument,
            "normalized item matrix must have max |b| = 1");
    ItemParams p;
    p.theta_ = rho * b;
    p.rho_ = rho;
    p.b_ = std::move(b);
    return p;
  }

  const Matrix& theta() const { return theta_; }
  const Matrix& b() const { return b_; }
  double rho() const { return rho_; }
  int j() const { return static_cast<int>(theta_.rows()); }
  int k() const { return static_cast<int>(theta_.cols()); }

 private:
  ItemParams() = default;

  Matrix theta_;
  double rho_ = 0.0;
  Matrix b_;
};

enum class ResponseKind { Observed, Population };

struct ResponseMatrix {
  Matrix values;
  ResponseKind kind = ResponseKind::Observed;

  int n() const { return static_cast<int>(values.rows()); }
  int j() const { return static_cast<int>(values.cols()); }
};

// R0 = Z Theta', i.e. R0(i, j) = Theta(j, label(i)). Entries are copied, so the
// result is bit-identical under any consistent relabeling of (Z, Theta).
inline ResponseMatrix population_matrix(const ClassAssignment& z, const Matrix& theta) {
  require(theta.cols() == z.k(), ErrorCode::DimensionMismatch,
          "Theta has " + std::to_string(theta.cols()) + " columns but K = " +
              std::to_string(z.k()));
  Matrix r0(z.n(), theta.rows());
  for (int i = 0; i < z.n(); ++i) r0.row(i) = theta.col(z.label(i)).transpose();
  return {std::move(r0), ResponseKind::Population};
}

inline ResponseMatrix population_matrix(const ClassAssignment& z, const ItemParams& params) {
  return population_matrix(z, params.theta());
}

// Per-profile item means: entry (j, k) is the average of R(:, j) over subjects in profile k.
inline Matrix profile_means(const Matrix& r, const ClassAssignment& z) {
  require(r.rows() == z.n(), ErrorCode::DimensionMismatch, "row count differs from N");
  Matrix sums = Matrix::Zero(r.cols(), z.k());
  for (int i = 0; i < z.n(); ++i) sums.col(z.label(i)) += r.row(i).transpose();
  for (int c = 0; c < z.k(); ++c) sums.col(c) /= static_cast<double>(z.size_of(c));
  return sums;
}

// Rejects Theta whose rank is below K (sigma_K <= 1e-10 sigma_1).
inline void require_full_column_rank(const Matrix& theta) {
  Eigen::JacobiSVD<Matrix> svd(theta);
  const auto& s = svd.singularValues();
  require(s.size() == theta.cols() && s(s.size() - 1) > 1e-10 * s(0), ErrorCode::DegenerateInput,
          "item parameter matrix must have full column rank K");
}

enum class Verdict { Satisfied, Violated, Indeterminate };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

// Distribution-specific bounds entering the concentration condition
// gamma >= tau^2 log(N + J) / max(N, J).
struct AssumptionReport {
  double gamma_bound = 0.0;
  bool gamma_exact = false;  // true only for Normal, where gamma = sigma^2
  std::optional<double> tau_bound;
  std::optional<double> threshold;
  Verdict verdict = Verdict::Indeterminate;
};

inline AssumptionReport check_assumption(const DistributionSpec& spec, double rho, int n, int j) {
  require(n >= 1 && j >= 1, ErrorCode::InvalidArgument, "N and J must be positive");
  require(spec.rho_domain().contains(rho), ErrorCode::RhoOutOfRange,
          "rho = " + std::to_string(rho) + " outside the legal range for " + spec.describe());
  AssumptionReport rep;
  switch (spec.kind()) {
    case DistributionKind::Bernoulli:
      rep.gamma_bound = rho;
      rep.tau_bound = 1.0;
      break;
    case DistributionKind::Binomial:
      rep.gamma_bound = rho;
      rep.tau_bound = static_cast<double>(spec.m());
      break;
    case DistributionKind::Poisson: rep.gamma_bound = rho; break;
    case DistributionKind::Normal:
      rep.gamma_bound = spec.sigma2();
      rep.gamma_exact = true;
      break;
    case DistributionKind::Exponential: rep.gamma_bound = rho * rho; break;
    case DistributionKind::Uniform: rep.gamma_bound = rho * rho / 3.0; break;
    case DistributionKind::Signed:
      rep.gamma_bound = 1.0;
      rep.tau_bound = 2.0;
      break;
  }
  if (rep.tau_bound) {
    double tau = *rep.tau_bound;
    rep.threshold = tau * tau * std::log(static_cast<double>(n) + j) / std::max(n, j);
    rep.verdict = rep.gamma_bound >= *rep.threshold ? Verdict::Satisfied : Verdict::Violated;
  }
  return rep;
}

}  // namespace wlcm
