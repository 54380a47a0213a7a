#pragma once

#include <Eigen/SVD>

#include <cmath>
#include <vector>

#include "sfmc/solver.hpp"

namespace sfmc {

/// Accelerated proximal gradient (monotone FISTA) for the l1-relaxed A-step
///   min_A I_A(A) + lambda ||A||_1 + (rho/2) ||Z - D A||_F^2,
/// with the soft-threshold-then-clamp prox and step 1/(rho ||D||_2^2).
/// The monotone variant keeps the best iterate, so the objective is
/// non-increasing across iterations.
inline SubsolveResult solve_a_l1_fista(const Matrix& D, const Matrix& Z, double lambda, double rho,
                                       const Box& a_box, double eps, int max_iters,
                                       const Matrix* warm_start = nullptr) {
  if (!(rho > 0) || !(lambda >= 0)) throw std::invalid_argument("solve_a_l1_fista: bad params");
  if (!a_box.contains(0.0)) throw std::invalid_argument("solve_a_l1_fista: box must contain 0");
  const double snorm = spectral_norm(D);
  if (snorm == 0.0) throw std::invalid_argument("solve_a_l1_fista: D must be nonzero");
  const double L = rho * snorm * snorm;
  const double step_thresh = lambda / L;

  const Matrix G = D.transpose() * D;
  const Matrix C = D.transpose() * Z;
  const double z_sq = Z.squaredNorm();

  auto objective = [&](const Matrix& A) {
    // rho/2 ||Z - D A||_F^2 + lambda ||A||_1, expanded via the Gram matrix.
    const double quad = z_sq - 2.0 * (C.cwiseProduct(A)).sum() + (A.cwiseProduct(G * A)).sum();
    return 0.5 * rho * quad + lambda * A.cwiseAbs().sum();
  };
  auto prox = [&](Matrix V) {
    for (Index j = 0; j < V.cols(); ++j)
      for (Index i = 0; i < V.rows(); ++i)
        V(i, j) = a_box.clamp(Likelihood::soft_threshold(V(i, j), step_thresh));
    return V;
  };

  Matrix A = warm_start ? *warm_start : Matrix::Zero(D.cols(), Z.cols());
  Matrix Y = A;
  double f_best = objective(A);
  double t = 1.0;

  SubsolveResult out;
  out.cap_reached = true;
  for (int it = 0; it < max_iters; ++it) {
    const Matrix Znew = prox(Y - rho * (G * Y - C) / L);
    const double f_new = objective(Znew);
    const Matrix A_prev = A;
    const bool accepted = f_new <= f_best;
    if (accepted) {
      A = Znew;
      f_best = f_new;
    }  // else keep A (monotone step)
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Y = A + (t / t_next) * (Znew - A) + ((t - 1.0) / t_next) * (A - A_prev);
    t = t_next;

    // On a rejected step, progress is measured by how far the prox point
    // strayed from the kept iterate; stopping there only when they coincide.
    const double change = accepted ? (A - A_prev).norm() : (Znew - A).norm();
    const double base = accepted ? A_prev.norm() : A.norm();
    out.iters = it + 1;
    const bool done = base > 0.0 ? (change / base <= eps) : (change == 0.0);
    if (done) {
      out.cap_reached = false;
      break;
    }
  }
  out.value = std::move(A);
  return out;
}

/// ADMM variant with the l0 penalty replaced by l1 (the A-step solved by the
/// accelerated first-order method above).
inline AdmmResult admm_solve_l1(const Problem& problem, const AdmmConfig& config,
                                std::optional<FactorPair> init, std::mt19937_64& rng) {
  const ASubsolver fista = [](const Matrix& D, const Matrix& Z, double lambda, double rho,
                              const Box& a_box, double eps, int max_iters, const Matrix* warm) {
    return solve_a_l1_fista(D, Z, lambda, rho, a_box, eps, max_iters, warm);
  };
  return admm_solve_with(problem, config, std::move(init), rng, fista);
}

/// Singular-value soft threshold: reconstruct with singular values
/// max(s_i - t, 0).
inline Matrix svd_soft_threshold(const Matrix& M, double t) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("svd_soft_threshold: SVD failed");
  Vector s = (svd.singularValues().array() - t).max(0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

struct NuclearResult {
  Matrix X;
  std::vector<double> objectives;
  int iters = 0;
  bool cap_reached = false;
};

/// Nuclear-norm-regularized completion
///   min_X ||Y_S - X_S||_F^2 + lambda ||X||_*,
/// solved by proximal gradient with singular-value soft thresholding. The
/// masked quadratic has Lipschitz constant 2, so the default step 1/2
/// guarantees a non-increasing objective.
inline NuclearResult nuclear_norm_complete(const Problem& problem, double lambda,
                                           double step = 0.5, int max_iters = 500,
                                           double tol = 1e-7) {
  if (!(lambda >= 0) || !(step > 0) || max_iters <= 0)
    throw std::invalid_argument("nuclear_norm_complete: bad params");
  const Index n1 = problem.rows(), n2 = problem.cols();
  const auto& ent = problem.mask.entries();

  Matrix Y = Matrix::Zero(n1, n2);
  for (size_t tn = 0; tn < ent.size(); ++tn) Y(ent[tn].first, ent[tn].second) = problem.observations[tn];

  auto fit = [&](const Matrix& X) {
    double v = 0.0;
    for (size_t tn = 0; tn < ent.size(); ++tn) {
      const double d = Y(ent[tn].first, ent[tn].second) - X(ent[tn].first, ent[tn].second);
      v += d * d;
    }
    return v;
  };
  auto nuclear = [&](const Matrix& X) {
    Eigen::BDCSVD<Matrix> svd(X);
    return svd.singularValues().sum();
  };

  NuclearResult out;
  out.X = Y;  // observed values, zeros elsewhere
  out.cap_reached = true;
  double prev_obj = fit(out.X) + lambda * nuclear(out.X);
  out.objectives.push_back(prev_obj);
  for (int it = 0; it < max_iters; ++it) {
    Matrix V = out.X;
    for (size_t tn = 0; tn < ent.size(); ++tn) {
      const auto [i, j] = ent[tn];
      V(i, j) -= step * 2.0 * (out.X(i, j) - Y(i, j));
    }
    Matrix Xn = svd_soft_threshold(V, lambda * step);
    const double change = (Xn - out.X).norm();
    const double base = out.X.norm();
    out.X = std::move(Xn);
    const double obj = fit(out.X) + lambda * nuclear(out.X);
    out.objectives.push_back(obj);
    out.iters = it + 1;
    if (base > 0.0 ? (change / base <= tol) : (change == 0.0)) {
      out.cap_reached = false;
      break;
    }
  }
  return out;
}

}  // namespace sfmc
