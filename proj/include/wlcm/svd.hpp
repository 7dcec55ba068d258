#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rng.hpp"
#include "types.hpp"

namespace wlcm {

// Top-K singular triplets, sigma descending. Each column of v has its
// largest-magnitude entry nonnegative (first such entry on ties); u follows.
struct TruncatedSvd {
  Matrix u;
  Vector sigma;
  Matrix v;

  int rank() const { return static_cast<int>(sigma.size()); }

  Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }

  // Leading k triplets; valid because the decomposition is nested in k.
  TruncatedSvd leading(int k) const {
    return {u.leftCols(k), sigma.head(k), v.leftCols(k)};
  }
};

struct SvdOptions {
  double tolerance = 1e-10;  // eigen-residual, relative to sigma_1
  int max_refinements = 50;
};

namespace detail {

inline Matrix orthonormal_basis(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

inline void apply_sign_convention(Matrix& u, Matrix& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      double a = std::abs(v(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (v(arg, c) < 0.0) {
      v.col(c) *= -1.0;
      u.col(c) *= -1.0;
    }
  }
}

// Rayleigh-Ritz on span(right): returns triplets with M right_out = left_out diag(sigma) exactly
// up to round-off.
inline TruncatedSvd rayleigh_ritz(const Matrix& m, const Matrix& right) {
  Matrix mv = m * right;
  Matrix left = orthonormal_basis(mv);
  Matrix small = left.transpose() * mv;
  Eigen::JacobiSVD<Matrix> svd(small, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {left * svd.matrixU(), svd.singularValues(), right * svd.matrixV()};
}

}  // namespace detail

namespace detail {

// Top-k eigenvectors of the smaller Gram matrix, as right singular vectors of `work`
// (rows >= cols).
inline Matrix gram_right_vectors(const Matrix& work, int k) {
  const Eigen::Index cols = work.cols();
  Matrix gram(cols, cols);
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(work.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  require(eig.info() == Eigen::Success, ErrorCode::ConvergenceFailure,
          "symmetric eigensolver failed");
  // Eigenvalues ascend; take the last k in descending order.
  return eig.eigenvectors().rightCols(k).rowwise().reverse();
}

// Projects x onto the orthogonal complement of the first `count` columns of basis, twice.
inline void reorthogonalize(const Matrix& basis, Eigen::Index count, Vector& x) {
  if (count == 0) return;
  for (int pass = 0; pass < 2; ++pass)
    x.noalias() -= basis.leftCols(count) * (basis.leftCols(count).transpose() * x);
}

// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization.
// Returns the span of the top-k right Ritz vectors once every non-negligible Ritz
// triplet has residual <= tol * sigma_1, or nothing on breakdown or when the Krylov
// dimension reaches max_dim (callers fall back to the dense path).
inline std::optional<Matrix> lanczos_right_vectors(const Matrix& a, int k, double tol,
                                                   Eigen::Index max_dim) {
  const Eigen::Index n = a.rows(), p = a.cols();
  Matrix u_basis(n, max_dim), v_basis(p, max_dim + 1);
  std::vector<double> alpha, beta;

  // Fixed start vector: deterministic for a given input.
  Vector v(p);
  std::uint64_t state = 0x2545f4914f6cdd1dULL;
  for (Eigen::Index i = 0; i < p; ++i) {
    state = mix64(state);
    v(i) = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
  }
  v.normalize();
  v_basis.col(0) = v;

  const double eps = std::numeric_limits<double>::epsilon();
  double beta_prev = 0.0;
  for (Eigen::Index j = 0; j < max_dim; ++j) {
    Vector u = a * v_basis.col(j);
    if (j > 0) u -= beta_prev * u_basis.col(j - 1);
    reorthogonalize(u_basis, j, u);
    double al = u.norm();
    if (!(al > eps * (alpha.empty() ? 1.0 : alpha.front()))) return std::nullopt;
    u /= al;
    u_basis.col(j) = u;
    alpha.push_back(al);

    Vector w = a.transpose() * u - al * v_basis.col(j);
    reorthogonalize(v_basis, j + 1, w);
    double be = w.norm();
    beta.push_back(be);
    beta_prev = be;

    const Eigen::Index m = j + 1;
    const bool check = m >= k && (m % 2 == 0 || m == max_dim || be == 0.0);
    if (check) {
      Matrix bidiag = Matrix::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        bidiag(i, i) = alpha[i];
        if (i + 1 < m) bidiag(i, i + 1) = beta[i];
      }
      Eigen::JacobiSVD<Matrix> svd(bidiag, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double negligible = static_cast<double>(std::max(n, p)) * eps * sv(0);
      bool converged = true;
      for (int c = 0; c < k && converged; ++c)
        if (sv(c) > negligible && be * std::abs(svd.matrixU()(m - 1, c)) > 0.1 * tol * sv(0))
          converged = false;
      if (converged) return Matrix(v_basis.leftCols(m) * svd.matrixV().leftCols(k));
    }
    if (!(be > eps * alpha.front())) return std::nullopt;
    v_basis.col(j + 1) = w / be;
  }
  return std::nullopt;
}

}  // namespace detail

// Inputs with min(N, J) above this use the Lanczos path first.
inline constexpr Eigen::Index kLanczosThreshold = 200;

// Best rank-K approximation of M.
//
// Right singular subspace from Golub-Kahan-Lanczos (large inputs) or from the
// top-K eigenvectors of the smaller Gram matrix, then a Rayleigh-Ritz step;
// subspace iterations follow until every non-negligible triplet satisfies
// ||M' u - sigma v|| <= tol * sigma_1.
inline TruncatedSvd top_k_svd(const Matrix& m, int k, const SvdOptions& opts = {}) {
  require(m.rows() > 0 && m.cols() > 0, ErrorCode::InvalidArgument, "empty matrix");
  require(k >= 1 && k <= std::min(m.rows(), m.cols()), ErrorCode::InvalidArgument,
          "K = " + std::to_string(k) + " must lie in [1, min(N, J)]");
  require(m.allFinite(), ErrorCode::NonFinite, "matrix has non-finite entries");

  // Work on the tall-or-square orientation so the Gram matrix is the smaller one.
  const bool transposed = m.rows() < m.cols();
  Matrix flipped;
  if (transposed) flipped = m.transpose();
  const Matrix& work = transposed ? flipped : m;

  std::optional<Matrix> right;
  const Eigen::Index small_dim = work.cols();
  if (small_dim > kLanczosThreshold) {
    const Eigen::Index max_dim = std::min<Eigen::Index>(small_dim / 2, 20 * k + 200);
    right = detail::lanczos_right_vectors(work, k, opts.tolerance, max_dim);
  }
  if (!right) right = detail::gram_right_vectors(work, k);

  TruncatedSvd out = detail::rayleigh_ritz(work, *right);
  const double scale = out.sigma(0);
  const double negligible = static_cast<double>(std::max(work.rows(), work.cols())) *
                            std::numeric_limits<double>::epsilon() * scale;

  auto residual = [&](const TruncatedSvd& t) {
    Matrix r = work.transpose() * t.u - t.v * t.sigma.asDiagonal();
    double worst = 0.0;
    for (int c = 0; c < k; ++c)
      if (t.sigma(c) > negligible) worst = std::max(worst, r.col(c).norm());
    return worst;
  };

  int refinements = 0;
  double res = residual(out);
  while (scale > 0.0 && res > opts.tolerance * scale) {
    if (refinements++ >= opts.max_refinements)
      throw Error(ErrorCode::ConvergenceFailure,
                  "top-K SVD residual " + std::to_string(res / scale) + " after " +
                      std::to_string(opts.max_refinements) + " refinements");
    Matrix next = detail::orthonormal_basis(work.transpose() * out.u);
    out = detail::rayleigh_ritz(work, next);
    res = residual(out);
  }

  if (transposed) std::swap(out.u, out.v);
  for (int c = 0; c < k; ++c)
    if (out.sigma(c) < 0.0) out.sigma(c) = 0.0;
  detail::apply_sign_convention(out.u, out.v);
  return out;
}

// Largest singular value, via the smaller Gram matrix.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const bool wide = m.rows() < m.cols();
  Matrix gram = wide ? Matrix(m * m.transpose()) : Matrix(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  require(eig.info() == Eigen::Success, ErrorCode::ConvergenceFailure,
          "symmetric eigensolver failed");
  return std::sqrt(std::max(0.0, eig.eigenvalues()(eig.eigenvalues().size() - 1)));
}

}  // namespace wlcm
