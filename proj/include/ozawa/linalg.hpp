#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ozawa/error.hpp"

namespace ozawa {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct JacobiResult {
  std::vector<Scalar> eigenvalues;  // ascending
  int sweeps = 0;
  Scalar off_norm = 0;
};

/// Off-diagonal Frobenius norm of a square matrix.
template <class Derived>
typename Derived::Scalar off_diagonal_norm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Scalar s = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

/// Eigenvalues of a symmetric matrix by the cyclic (row-by-row) Jacobi method.
///
/// Sweeps until the off-diagonal norm drops below tol * max(1, ||A||_F).
/// Throws Numerical if max_sweeps is exhausted.
template <class Derived>
JacobiResult<typename Derived::Scalar> jacobi_eigenvalues(const Eigen::MatrixBase<Derived>& input,
                                                          typename Derived::Scalar tol = 1e-12,
                                                          int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  Mat<Scalar> a = input;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorKind::Numerical, "jacobi: matrix is not square");
  JacobiResult<Scalar> out;
  const Scalar target = tol * std::max<Scalar>(Scalar(1), a.norm());
  out.off_norm = off_diagonal_norm(a);
  while (out.off_norm >= target) {
    if (out.sweeps == max_sweeps) {
      throw Error(ErrorKind::Numerical, "jacobi: no convergence after " +
                                            std::to_string(max_sweeps) + " sweeps");
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar app = a(p, p);
        const Scalar aqq = a(q, q);
        const Scalar theta = (aqq - app) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        // Column-major storage: rotate columns p and q, then rows via symmetry.
        auto cp = a.col(p);
        auto cq = a.col(q);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar x = cp(k);
          const Scalar y = cq(k);
          cp(k) = c * x - s * y;
          cq(k) = s * x + c * y;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          a(p, k) = a(k, p);
          a(q, k) = a(k, q);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = Scalar(0);
      }
    }
    ++out.sweeps;
    out.off_norm = off_diagonal_norm(a);
  }
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.eigenvalues[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

/// Taylor coefficients of sqrt(1 - z): a_0 = 1, a_{n+1} = a_n (n - 1/2)/(n + 1).
template <class Scalar = double>
std::vector<Scalar> sqrt_series_coefficients(int m) {
  if (m < 0) throw Error(ErrorKind::Parameter, "series length must be >= 0");
  std::vector<Scalar> a(static_cast<std::size_t>(m) + 1);
  a[0] = Scalar(1);
  for (int n = 0; n < m; ++n) {
    a[static_cast<std::size_t>(n) + 1] =
        a[static_cast<std::size_t>(n)] * (Scalar(n) - Scalar(0.5)) / Scalar(n + 1);
  }
  return a;
}

/// sum_k coeffs[k] * A^k by Paterson-Stockmeyer: about 2 sqrt(deg) products.
template <class Derived>
Mat<typename Derived::Scalar> matrix_polynomial(const Eigen::MatrixBase<Derived>& a,
                                               const std::vector<typename Derived::Scalar>& coeffs) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = a.rows();
  Mat<Scalar> result = Mat<Scalar>::Zero(n, n);
  if (coeffs.empty()) return result;
  const std::size_t deg = coeffs.size() - 1;
  const std::size_t s = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(double(deg + 1)))));
  std::vector<Mat<Scalar>> powers(s + 1);
  powers[0] = Mat<Scalar>::Identity(n, n);
  for (std::size_t k = 1; k <= s; ++k) powers[k] = powers[k - 1] * a;
  const std::size_t blocks = deg / s + 1;
  for (std::size_t b = blocks; b-- > 0;) {
    Mat<Scalar> chunk = Mat<Scalar>::Zero(n, n);
    for (std::size_t k = 0; k < s; ++k) {
      const std::size_t idx = b * s + k;
      if (idx <= deg && coeffs[idx] != Scalar(0)) chunk.noalias() += coeffs[idx] * powers[k];
    }
    if (b + 1 == blocks) {
      result = std::move(chunk);
    } else {
      Mat<Scalar> next = result * powers[s];
      next += chunk;
      result = std::move(next);
    }
  }
  return result;
}

}  // namespace ozawa
