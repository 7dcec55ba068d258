#pragma once
// Slow, independent reference implementations. Deliberately written with plain loops and
// std::vector so they share no code path with the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "wlcm/types.hpp"

namespace oracle {

using Grid = std::vector<std::vector<double>>;

inline Grid to_grid(const wlcm::Matrix& m) {
  Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  return g;
}

// One-sided Jacobi: rotates column pairs of A until mutually orthogonal; the column
// norms are then the singular values. Returned descending.
inline std::vector<double> singular_values(const wlcm::Matrix& m) {
  Grid a = to_grid(m.rows() >= m.cols() ? m : wlcm::Matrix(m.transpose()));
  const std::size_t rows = a.size(), cols = a[0].size();
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < cols; ++p)
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += a[i][p] * a[i][p];
          beta += a[i][q] * a[i][q];
          gamma += a[i][p] * a[i][q];
        }
        if (gamma == 0.0) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        double zeta = (beta - alpha) / (2 * gamma);
        double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
        double c = 1 / std::sqrt(1 + t * t), s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          double x = a[i][p], y = a[i][q];
          a[i][p] = c * x - s * y;
          a[i][q] = s * x + c * y;
        }
      }
    if (off < 1e-15) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < rows; ++i) s += a[i][j] * a[i][j];
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.rbegin(), sv.rend());
  return sv;
}

// All permutations of 0..k-1.
inline std::vector<std::vector<int>> permutations(int k) {
  std::vector<int> p(static_cast<std::size_t>(k));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Subjects whose estimated label, renamed by perm, differs from the truth; minimized.
inline double hamming(const std::vector<int>& truth, const std::vector<int>& est, int k) {
  double best = 1e300;
  for (const auto& p : permutations(k)) {
    int wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += p[est[i]] != truth[i];
    best = std::min(best, static_cast<double>(wrong) / truth.size());
  }
  return best;
}

// Set-based: for true profile a matched with estimated profile p^{-1}(a), count the
// symmetric difference of the two subject sets and divide by |true profile a|.
inline double clustering_error(const std::vector<int>& truth, const std::vector<int>& est, int k) {
  double best = 1e300;
  for (const auto& p : permutations(k)) {
    double worst = 0.0;
    for (int a = 0; a < k; ++a) {
      int in_truth = 0, sym = 0;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        bool t = truth[i] == a, e = p[est[i]] == a;
        in_truth += t;
        sym += t != e;
      }
      worst = std::max(worst, static_cast<double>(sym) / in_truth);
    }
    best = std::min(best, worst);
  }
  return best;
}

// min over column permutations of ||theta_hat P - theta|| (entrywise l1 or Frobenius), relative.
inline std::pair<double, double> relative_errors(const wlcm::Matrix& theta,
                                                 const wlcm::Matrix& theta_hat) {
  const int k = static_cast<int>(theta.cols());
  double n1 = 0, n2 = 0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    n1 += std::abs(theta.data()[i]);
    n2 += theta.data()[i] * theta.data()[i];
  }
  double b1 = 1e300, b2 = 1e300;
  for (const auto& p : permutations(k)) {
    double e1 = 0, e2 = 0;
    for (int c = 0; c < k; ++c)
      for (Eigen::Index j = 0; j < theta.rows(); ++j) {
        double d = theta_hat(j, p[c]) - theta(j, c);
        e1 += std::abs(d);
        e2 += d * d;
      }
    b1 = std::min(b1, e1);
    b2 = std::min(b2, e2);
  }
  return {b1 / n1, std::sqrt(b2) / std::sqrt(n2)};
}

// NMI = 2 I(X;Y) / (H(X) + H(Y)) from label frequencies.
inline double nmi(const std::vector<int>& x, const std::vector<int>& y) {
  const double n = static_cast<double>(x.size());
  std::map<int, double> px, py;
  std::map<std::pair<int, int>, double> pxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    px[x[i]] += 1 / n;
    py[y[i]] += 1 / n;
    pxy[{x[i], y[i]}] += 1 / n;
  }
  double hx = 0, hy = 0, mi = 0;
  for (auto& [_, p] : px) hx -= p * std::log(p);
  for (auto& [_, p] : py) hy -= p * std::log(p);
  for (auto& [key, p] : pxy) mi += p * std::log(p / (px[key.first] * py[key.second]));
  if (hx + hy == 0) return 1.0;
  return 2 * mi / (hx + hy);
}

// ARI from explicit pair counting: 2(ad - bc) / ((a+b)(b+d) + (a+c)(c+d)).
inline double ari(const std::vector<int>& x, const std::vector<int>& y) {
  double a = 0, b = 0, c = 0, d = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      bool sx = x[i] == x[j], sy = y[i] == y[j];
      if (sx && sy) ++a;
      else if (sx) ++b;
      else if (sy) ++c;
      else ++d;
    }
  double den = (a + b) * (b + d) + (a + c) * (c + d);
  if (den == 0) return 1.0;
  return 2 * (a * d - b * c) / den;
}

// Global K-means optimum by enumerating every labelling (tiny N only).
inline double kmeans_optimum(const Grid& pts, int k) {
  const std::size_t n = pts.size(), d = pts[0].size();
  std::vector<int> lab(n, 0);
  double best = 1e300;
  while (true) {
    std::vector<std::vector<double>> sum(k, std::vector<double>(d, 0.0));
    std::vector<int> cnt(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++cnt[lab[i]];
      for (std::size_t t = 0; t < d; ++t) sum[lab[i]][t] += pts[i][t];
    }
    if (std::find(cnt.begin(), cnt.end(), 0) == cnt.end()) {
      double obj = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < d; ++t) {
          double diff = pts[i][t] - sum[lab[i]][t] / cnt[lab[i]];
          obj += diff * diff;
        }
      best = std::min(best, obj);
    }
    std::size_t pos = 0;
    while (pos < n && ++lab[pos] == k) lab[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

// ||A||_2 by power iteration on A'A.
inline double spectral_norm(const wlcm::Matrix& a, int iters = 2000) {
  wlcm::Vector v = wlcm::Vector::Ones(a.cols());
  v.normalize();
  double s = 0;
  for (int i = 0; i < iters; ++i) {
    wlcm::Vector w = a.transpose() * (a * v);
    double nw = w.norm();
    if (nw == 0) return 0;
    v = w / nw;
    s = std::sqrt(nw);
  }
  return s;
}

}  // namespace oracle
