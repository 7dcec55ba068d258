#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace wlcm {

struct KmeansOptions {
  int max_iters = 100;
  int restarts = 1;
};

struct KmeansResult {
  std::vector<int> labels;  // 0-based
  RowMatrix centroids;      // K x d
  double objective = 0.0;   // sum_i ||x_i - centroid(label_i)||^2
  int iterations = 0;
  std::vector<double> history;  // objective after each assignment step
};

namespace detail {

inline double sq_dist(const RowMatrix& a, Eigen::Index i, const RowMatrix& b, Eigen::Index c) {
  return (a.row(i) - b.row(c)).squaredNorm();
}

// k-means++ seeding.
inline RowMatrix kmeanspp_init(const RowMatrix& x, int k, RngHandle& rng) {
  const auto n = x.rows();
  RowMatrix centers(k, x.cols());
  centers.row(0) = x.row(rng.below(static_cast<int>(n)));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = sq_dist(x, i, centers, 0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : d2) total += d;
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Guard against landing on a zero-weight point at the tail through rounding.
      while (pick > 0 && d2[pick] == 0.0) --pick;
    } else {
      pick = rng.below(static_cast<int>(n));
    }
    centers.row(c) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x, i, centers, c));
  }
  return centers;
}

// Nearest centroid; ties resolve to the lowest index.
inline int nearest(const RowMatrix& x, Eigen::Index i, const RowMatrix& centers, double& best) {
  int arg = 0;
  best = sq_dist(x, i, centers, 0);
  for (Eigen::Index c = 1; c < centers.rows(); ++c) {
    double d = sq_dist(x, i, centers, c);
    if (d < best) {
      best = d;
      arg = static_cast<int>(c);
    }
  }
  return arg;
}

inline void update_centroids(const RowMatrix& x, std::vector<int>& labels, RowMatrix& centers) {
  const int k = static_cast<int>(centers.rows());
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  RowMatrix sums = RowMatrix::Zero(k, x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    sums.row(labels[i]) += x.row(i);
    ++counts[labels[i]];
  }
  // An empty cluster takes the point farthest from its current centroid.
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (counts[labels[i]] <= 1) continue;
      double d = (x.row(i) - sums.row(labels[i]) / counts[labels[i]]).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0) break;  // cannot happen with N >= K
    int from = labels[far];
    sums.row(from) -= x.row(far);
    --counts[from];
    labels[far] = c;
    sums.row(c) = x.row(far);
    counts[c] = 1;
  }
  for (int c = 0; c < k; ++c) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
}

inline double objective_of(const RowMatrix& x, const std::vector<int>& labels,
                           const RowMatrix& centers) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) total += sq_dist(x, i, centers, labels[i]);
  return total;
}

inline KmeansResult lloyd(const RowMatrix& x, RowMatrix centers, int max_iters) {
  const auto n = x.rows();
  KmeansResult res;
  res.labels.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 1; iter <= max_iters; ++iter) {
    bool changed = false;
    double obj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d;
      int c = nearest(x, i, centers, d);
      obj += d;
      if (c != res.labels[i]) {
        res.labels[i] = c;
        changed = true;
      }
    }
    res.history.push_back(obj);
    res.iterations = iter;
    if (!changed) break;
    update_centroids(x, res.labels, centers);
  }
  // Centroids consistent with the final labels (also repairs any empty cluster).
  update_centroids(x, res.labels, centers);
  res.centroids = std::move(centers);
  res.objective = objective_of(x, res.labels, res.centroids);
  return res;
}

}  // namespace detail

// Lloyd's algorithm from k-means++ seeding; the best of opts.restarts runs is returned.
inline KmeansResult kmeans(const RowMatrix& points, int k, RngHandle& rng,
                           const KmeansOptions& opts = {}) {
  require(k >= 1, ErrorCode::InvalidArgument, "K must be >= 1");
  require(points.rows() >= k, ErrorCode::DegenerateInput,
          "K-means needs at least K points");
  require(points.cols() >= 1, ErrorCode::DegenerateInput, "points need at least one coordinate");
  require(opts.max_iters >= 1 && opts.restarts >= 1, ErrorCode::InvalidArgument,
          "max_iters and restarts must be positive");
  require(points.allFinite(), ErrorCode::NonFinite, "K-means input has non-finite entries");
  KmeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    auto run = detail::lloyd(points, detail::kmeanspp_init(points, k, rng), opts.max_iters);
    if (run.objective < best.objective) best = std::move(run);
  }
  return best;
}

}  // namespace wlcm
