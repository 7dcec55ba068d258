#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "kmeans.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "svd.hpp"
#include "types.hpp"

namespace wlcm {

enum class Method { SCK, RMK };

inline std::string_view to_string(Method m) { return m == Method::SCK ? "SCK" : "RMK"; }

inline Method parse_method(std::string_view name) {
  if (name == "SCK" || name == "sck") return Method::SCK;
  if (name == "RMK" || name == "rmk") return Method::RMK;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

struct Estimate {
  ClassAssignment z_hat;
  Matrix theta_hat;  // J x K
  Method method;
  double elapsed = 0.0;  // seconds, estimation steps only
};

struct EstimatorOptions {
  KmeansOptions kmeans;
  SvdOptions svd;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

inline void check_input(const Matrix& r, int k) {
  require(k >= 1 && k <= std::min(r.rows(), r.cols()), ErrorCode::InvalidArgument,
          "K = " + std::to_string(k) + " must lie in [1, min(N, J)]");
  require(r.allFinite(), ErrorCode::NonFinite, "response matrix has non-finite entries");
}

inline Vector inverse_class_sizes(const ClassAssignment& z) {
  Vector inv(z.k());
  for (int c = 0; c < z.k(); ++c) {
    require(z.size_of(c) > 0, ErrorCode::SingularClassMatrix,
            "estimated profile " + std::to_string(c + 1) + " is empty");
    inv(c) = 1.0 / z.size_of(c);
  }
  return inv;
}

// Theta_hat = V Sigma U' Z (Z'Z)^{-1}; U'Z is K x K (column sums of U rows per class).
inline Matrix sck_theta(const TruncatedSvd& svd, const ClassAssignment& z) {
  Matrix utz = Matrix::Zero(svd.rank(), z.k());
  for (int i = 0; i < z.n(); ++i) utz.col(z.label(i)) += svd.u.row(i).transpose();
  return svd.v * svd.sigma.asDiagonal() * utz * inverse_class_sizes(z).asDiagonal();
}

inline ClassAssignment cluster_rows(const RowMatrix& rows, int k, RngHandle& rng,
                                    const KmeansOptions& opts) {
  auto km = kmeans(rows, k, rng, opts);
  return ClassAssignment(std::move(km.labels), k);
}

inline Estimate sck_from_svd(const TruncatedSvd& svd, int k, RngHandle& rng,
                             const EstimatorOptions& opts) {
  RowMatrix rows = svd.u.leftCols(k);
  auto z = cluster_rows(rows, k, rng, opts.kmeans);
  Matrix theta = sck_theta(svd.leading(k), z);
  return {std::move(z), std::move(theta), Method::SCK, 0.0};
}

}  // namespace detail

// Spectral clustering with K-means: top-K SVD, K-means on the rows of U_hat,
// Theta_hat = R_hat' Z_hat (Z_hat' Z_hat)^{-1}. Applied to R0 this is the ideal estimator.
inline Estimate sck(const Matrix& r, int k, RngHandle& rng, const EstimatorOptions& opts = {}) {
  detail::check_input(r, k);
  auto start = detail::Clock::now();
  auto svd = top_k_svd(r, k, opts.svd);
  auto est = detail::sck_from_svd(svd, k, rng, opts);
  est.elapsed = detail::seconds_since(start);
  return est;
}

// Response-matrix K-means: K-means directly on the rows of R, Theta_hat = R' Z_hat (Z_hat' Z_hat)^{-1}.
inline Estimate rmk(const Matrix& r, int k, RngHandle& rng, const EstimatorOptions& opts = {}) {
  detail::check_input(r, k);
  auto start = detail::Clock::now();
  RowMatrix rows = r;
  auto z = detail::cluster_rows(rows, k, rng, opts.kmeans);
  Matrix theta = profile_means(r, z);
  detail::inverse_class_sizes(z);
  Estimate est{std::move(z), std::move(theta), Method::RMK, 0.0};
  est.elapsed = detail::seconds_since(start);
  return est;
}

inline Estimate estimate(Method method, const Matrix& r, int k, RngHandle& rng,
                         const EstimatorOptions& opts = {}) {
  return method == Method::SCK ? sck(r, k, rng, opts) : rmk(r, k, rng, opts);
}

inline Estimate ideal_sck(const ResponseMatrix& r0, int k, RngHandle& rng) {
  require(r0.kind == ResponseKind::Population, ErrorCode::InvalidArgument,
          "ideal estimator expects a population matrix");
  return sck(r0.values, k, rng);
}

inline Estimate ideal_rmk(const ResponseMatrix& r0, int k, RngHandle& rng) {
  require(r0.kind == ResponseKind::Population, ErrorCode::InvalidArgument,
          "ideal estimator expects a population matrix");
  return rmk(r0.values, k, rng);
}

struct KSelection {
  int k_hat = 1;
  std::vector<double> scores;  // scores[k-1] = ||R - Z_hat Theta_hat'||_2 for SCK at k
};

// Picks k in 1..k_max minimizing the spectral norm of R - Z_hat Theta_hat' (SCK fits).
// Scores within 1e-10 * ||R||_2 of the minimum count as ties and resolve to the smaller k.
inline KSelection estimate_k(const Matrix& r, int k_max, RngHandle& rng,
                             const EstimatorOptions& opts = {}) {
  detail::check_input(r, k_max);
  auto svd = top_k_svd(r, k_max, opts.svd);
  const std::uint64_t base = rng.next_u64();
  KSelection sel;
  sel.scores.resize(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    RngHandle sub(derive_seed(base, static_cast<std::uint64_t>(k)));
    auto est = detail::sck_from_svd(svd, k, sub, opts);
    Matrix fitted(r.rows(), r.cols());
    for (int i = 0; i < est.z_hat.n(); ++i)
      fitted.row(i) = est.theta_hat.col(est.z_hat.label(i)).transpose();
    sel.scores[static_cast<std::size_t>(k - 1)] = spectral_norm(r - fitted);
  }
  const double tie = 1e-10 * svd.sigma(0);
  double best = sel.scores[0];
  for (double s : sel.scores) best = std::min(best, s);
  for (int k = 1; k <= k_max; ++k)
    if (sel.scores[static_cast<std::size_t>(k - 1)] <= best + tie) {
      sel.k_hat = k;
      break;
    }
  return sel;
}

}  // namespace wlcm
