#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "types.hpp"

namespace wlcm {

enum class Sense { Minimize, Maximize };

// How per-pair costs combine along a permutation.
enum class Aggregate { Sum, Bottleneck };

// perm[k] is the column matched to row k.
using Permutation = std::vector<int>;

inline constexpr int kExhaustiveLimit = 8;

namespace detail {

inline double combine(const Matrix& cost, const Permutation& perm, Aggregate agg) {
  double acc = agg == Aggregate::Sum ? 0.0 : -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < perm.size(); ++k) {
    double c = cost(static_cast<Eigen::Index>(k), perm[k]);
    acc = agg == Aggregate::Sum ? acc + c : std::max(acc, c);
  }
  return acc;
}

// Enumerates all K! permutations; the first optimum in lexicographic order wins.
inline Permutation exhaustive_assignment(const Matrix& cost, Aggregate agg) {
  Permutation perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  Permutation best = perm;
  double best_val = combine(cost, perm, agg);
  while (std::next_permutation(perm.begin(), perm.end())) {
    double v = combine(cost, perm, agg);
    if (v < best_val) {
      best_val = v;
      best = perm;
    }
  }
  return best;
}

// Hungarian method with potentials, O(K^3), minimizing the sum.
inline Permutation hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  Permutation perm(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

// Kuhn's augmenting-path perfect matching restricted to edges with cost <= limit.
inline bool threshold_matching(const Matrix& cost, double limit, Permutation& perm) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> match_col(n, -1);
  std::vector<char> seen;
  auto augment = [&](auto&& self, int row) -> bool {
    for (int c = 0; c < n; ++c) {
      if (cost(row, c) > limit || seen[c]) continue;
      seen[c] = 1;
      if (match_col[c] < 0 || self(self, match_col[c])) {
        match_col[c] = row;
        return true;
      }
    }
    return false;
  };
  for (int r = 0; r < n; ++r) {
    seen.assign(n, 0);
    if (!augment(augment, r)) return false;
  }
  perm.assign(n, -1);
  for (int c = 0; c < n; ++c) perm[match_col[c]] = c;
  return true;
}

// Minimizes the largest matched cost: binary search over the sorted distinct costs.
inline Permutation bottleneck_assignment(const Matrix& cost) {
  std::vector<double> values(cost.data(), cost.data() + cost.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::size_t lo = 0, hi = values.size() - 1;
  Permutation perm;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (threshold_matching(cost, values[mid], perm))
      hi = mid;
    else
      lo = mid + 1;
  }
  threshold_matching(cost, values[lo], perm);
  return perm;
}

}  // namespace detail

// Optimal assignment of rows to columns. Exhaustive search for K <= 8;
// Hungarian (sum) or threshold matching (bottleneck) beyond.
inline Permutation best_permutation(const Matrix& cost, Sense sense,
                                    Aggregate agg = Aggregate::Sum) {
  require(cost.rows() == cost.cols() && cost.rows() >= 1, ErrorCode::DimensionMismatch,
          "assignment needs a non-empty square matrix");
  require(cost.allFinite(), ErrorCode::NonFinite, "assignment costs must be finite");
  Matrix c = sense == Sense::Maximize ? Matrix(-cost) : cost;
  if (c.rows() <= kExhaustiveLimit) return detail::exhaustive_assignment(c, agg);
  return agg == Aggregate::Sum ? detail::hungarian(c) : detail::bottleneck_assignment(c);
}

inline double assignment_value(const Matrix& cost, const Permutation& perm, Aggregate agg) {
  return detail::combine(cost, perm, agg);
}

}  // namespace wlcm
