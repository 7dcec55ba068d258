#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "assignment.hpp"
#include "model.hpp"
#include "types.hpp"

namespace wlcm {

// c(k, l) = number of subjects in true profile k and estimated profile l.
struct ConfusionMatrix {
  Matrix counts;
  Vector row_sums;
  Vector col_sums;
  double total = 0.0;
};

inline ConfusionMatrix confusion(const ClassAssignment& truth, const ClassAssignment& est) {
  require(truth.n() == est.n(), ErrorCode::DimensionMismatch, "partitions cover different N");
  ConfusionMatrix cm;
  cm.counts = Matrix::Zero(truth.k(), est.k());
  for (int i = 0; i < truth.n(); ++i) cm.counts(truth.label(i), est.label(i)) += 1.0;
  cm.row_sums = cm.counts.rowwise().sum();
  cm.col_sums = cm.counts.colwise().sum().transpose();
  cm.total = truth.n();
  return cm;
}

// Denominator of the per-profile proportion in the clustering error.
enum class ErrorDenominator {
  ClassSize,  // N_k, the true size of the profile being compared
  LastClass,  // N_K for every profile (literal reading of the printed formula)
};

inline void require_same_k(const ClassAssignment& truth, const ClassAssignment& est) {
  require(truth.n() == est.n() && truth.k() == est.k(), ErrorCode::DimensionMismatch,
          "partitions must share N and K");
}

// min over permutations of the max per-profile symmetric-difference proportion.
inline double clustering_error(const ClassAssignment& truth, const ClassAssignment& est,
                               ErrorDenominator denom = ErrorDenominator::ClassSize) {
  require_same_k(truth, est);
  auto cm = confusion(truth, est);
  const int k = truth.k();
  Matrix cost(k, k);
  for (int a = 0; a < k; ++a) {
    double nk = denom == ErrorDenominator::ClassSize ? cm.row_sums(a) : cm.row_sums(k - 1);
    for (int b = 0; b < k; ++b)
      cost(a, b) = (cm.row_sums(a) - cm.counts(a, b) + cm.col_sums(b) - cm.counts(a, b)) / nk;
  }
  auto perm = best_permutation(cost, Sense::Minimize, Aggregate::Bottleneck);
  return assignment_value(cost, perm, Aggregate::Bottleneck);
}

// Fraction of subjects misclassified under the best relabeling. With literal_l0 the
// entrywise count of the one-hot difference is used instead (twice the subject count).
inline double hamming_error(const ClassAssignment& truth, const ClassAssignment& est,
                            bool literal_l0 = false) {
  require_same_k(truth, est);
  auto cm = confusion(truth, est);
  auto perm = best_permutation(cm.counts, Sense::Maximize);
  double agree = assignment_value(cm.counts, perm, Aggregate::Sum);
  double wrong = cm.total - agree;
  return (literal_l0 ? 2.0 * wrong : wrong) / cm.total;
}

inline int nonempty(const Vector& sums) {
  int count = 0;
  for (Eigen::Index i = 0; i < sums.size(); ++i) count += sums(i) > 0 ? 1 : 0;
  return count;
}

inline double nmi(const ConfusionMatrix& cm) {
  const int true_parts = nonempty(cm.row_sums);
  const int est_parts = nonempty(cm.col_sums);
  if (true_parts == 1 && est_parts == 1) return 1.0;
  if (true_parts == 1 || est_parts == 1) return 0.0;
  const double n = cm.total;
  double num = 0.0;
  for (Eigen::Index a = 0; a < cm.counts.rows(); ++a)
    for (Eigen::Index b = 0; b < cm.counts.cols(); ++b) {
      double c = cm.counts(a, b);
      if (c > 0) num += c * std::log(c * n / (cm.row_sums(a) * cm.col_sums(b)));
    }
  double den = 0.0;
  for (Eigen::Index a = 0; a < cm.row_sums.size(); ++a)
    if (cm.row_sums(a) > 0) den += cm.row_sums(a) * std::log(cm.row_sums(a) / n);
  for (Eigen::Index b = 0; b < cm.col_sums.size(); ++b)
    if (cm.col_sums(b) > 0) den += cm.col_sums(b) * std::log(cm.col_sums(b) / n);
  return std::clamp(-2.0 * num / den, 0.0, 1.0);
}

inline double nmi(const ClassAssignment& truth, const ClassAssignment& est) {
  return nmi(confusion(truth, est));
}

inline double choose2(double x) { return x * (x - 1.0) / 2.0; }

inline double ari(const ConfusionMatrix& cm) {
  double pairs = 0.0, rows = 0.0, cols = 0.0;
  for (Eigen::Index a = 0; a < cm.counts.rows(); ++a)
    for (Eigen::Index b = 0; b < cm.counts.cols(); ++b) pairs += choose2(cm.counts(a, b));
  for (Eigen::Index a = 0; a < cm.row_sums.size(); ++a) rows += choose2(cm.row_sums(a));
  for (Eigen::Index b = 0; b < cm.col_sums.size(); ++b) cols += choose2(cm.col_sums(b));
  const double all = choose2(cm.total);
  const double expected = all > 0 ? rows * cols / all : 0.0;
  const double denom = 0.5 * (rows + cols) - expected;
  if (denom == 0.0) {
    // Identical partitions up to relabeling have every row/column with one non-zero cell.
    bool identical = nonempty(cm.row_sums) == nonempty(cm.col_sums);
    for (Eigen::Index a = 0; identical && a < cm.counts.rows(); ++a) {
      int cells = 0;
      for (Eigen::Index b = 0; b < cm.counts.cols(); ++b) cells += cm.counts(a, b) > 0 ? 1 : 0;
      identical = cells <= 1;
    }
    return identical ? 1.0 : 0.0;
  }
  return std::clamp((pairs - expected) / denom, -1.0, 1.0);
}

inline double ari(const ClassAssignment& truth, const ClassAssignment& est) {
  return ari(confusion(truth, est));
}

struct ThetaErrors {
  double rel_l1;
  double rel_l2;
};

// Relative l1 / Frobenius distance of theta_hat to theta under the best column matching,
// each norm minimized over its own permutation.
inline ThetaErrors relative_theta_errors(const Matrix& theta, const Matrix& theta_hat) {
  require(theta.rows() == theta_hat.rows() && theta.cols() == theta_hat.cols(),
          ErrorCode::DimensionMismatch, "Theta and its estimate differ in shape");
  const double norm1 = theta.cwiseAbs().sum();
  const double norm2 = theta.norm();
  require(norm1 > 0.0, ErrorCode::ZeroTheta, "Theta is identically zero");
  const auto k = theta.cols();
  Matrix cost1(k, k), cost2(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) {
      cost1(a, b) = (theta_hat.col(b) - theta.col(a)).cwiseAbs().sum();
      cost2(a, b) = (theta_hat.col(b) - theta.col(a)).squaredNorm();
    }
  double best1 = assignment_value(cost1, best_permutation(cost1, Sense::Minimize), Aggregate::Sum);
  double best2 = assignment_value(cost2, best_permutation(cost2, Sense::Minimize), Aggregate::Sum);
  return {best1 / norm1, std::sqrt(best2) / norm2};
}

struct MetricVector {
  double clustering_error = 0.0;
  double hamming_error = 0.0;
  double nmi = 1.0;
  double ari = 1.0;
  double rel_l1 = 0.0;
  double rel_l2 = 0.0;
};

inline MetricVector evaluate(const ClassAssignment& truth, const ClassAssignment& est,
                             const Matrix& theta, const Matrix& theta_hat) {
  MetricVector mv;
  mv.clustering_error = clustering_error(truth, est);
  mv.hamming_error = hamming_error(truth, est);
  auto cm = confusion(truth, est);
  mv.nmi = nmi(cm);
  mv.ari = ari(cm);
  auto te = relative_theta_errors(theta, theta_hat);
  mv.rel_l1 = te.rel_l1;
  mv.rel_l2 = te.rel_l2;
  return mv;
}

}  // namespace wlcm
