// Test-only reference implementations, kept independent of the library code
// they check: scalar minimizers, brute-force subproblem solvers, and
// quadrature.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

using Matrix = Eigen::MatrixXd;

/// Golden-section search for a scalar unimodal minimum on [a, b].
inline double golden_section(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-8) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Dense-grid scalar minimizer, used to bracket before refining.
inline double grid_min(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  double best_x = a, best_f = f(a);
  for (int i = 1; i < n; ++i) {
    const double x = a + (b - a) * i / (n - 1.0);
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return best_x;
}

/// Projected gradient for min_M (rho/2) ||Z - D M||_F^2 over box-constrained
/// M with an optional fixed support (entries outside the support pinned at
/// zero). Step 1/||D||_2^2 on the unscaled quadratic.
inline Matrix box_ls_projected_gradient(const Matrix& D, const Matrix& Z,
                                        const std::vector<char>& support, double lo, double hi,
                                        int iters) {
  const Matrix G = D.transpose() * D;
  const Matrix C = D.transpose() * Z;
  Eigen::JacobiSVD<Matrix> svd(D);
  const double s2 = svd.singularValues()(0) * svd.singularValues()(0);
  Matrix M = Matrix::Zero(D.cols(), Z.cols());
  for (int it = 0; it < iters; ++it) {
    Matrix Y = M - (G * M - C) / s2;
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
      for (Eigen::Index i = 0; i < Y.rows(); ++i) {
        if (!support.empty() && !support[size_t(i + Y.rows() * j)]) {
          Y(i, j) = 0.0;
          continue;
        }
        Y(i, j) = std::min(hi, std::max(lo, Y(i, j)));
      }
    M = Y;
  }
  return M;
}

/// Projected gradient for min_D (rho/2) ||Z - D A||_F^2 over a box, the
/// long-running reference for the projected-Newton subsolver.
inline Matrix d_projected_gradient(const Matrix& A, const Matrix& Z, double lo, double hi,
                                   int iters) {
  const Matrix S = A * A.transpose();
  const Matrix T = Z * A.transpose();
  Eigen::JacobiSVD<Matrix> svd(A);
  const double s2 = svd.singularValues()(0) * svd.singularValues()(0);
  Matrix D = Matrix::Zero(Z.rows(), A.rows());
  for (int it = 0; it < iters; ++it) {
    Matrix Y = D - (D * S - T) / s2;
    D = Y.cwiseMax(lo).cwiseMin(hi);
  }
  return D;
}

/// Composite Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracles
