#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "sfmc/core.hpp"
#include "sfmc/problem.hpp"

namespace sfmc {

/// ADMM solver parameters. The stop thresholds default to
/// 10 * sqrt(n1 n2 / 1e5), the paper's absolute values rescaled from the
/// 100x1000 problems they were tuned on.
struct AdmmConfig {
  double eps1 = 1e-7;  // A-subsolver relative-change tolerance
  double eps2 = 1e-7;  // D-subsolver relative-change tolerance
  std::optional<double> delta1_stop;
  std::optional<double> delta2_stop;
  double eta = 1.05;
  double rho0 = 1e-3;
  double lambda = 0.0;
  int max_outer_iters = 2000;
  int max_inner_iters = 500;
  double newton_damping_delta = 1e-6;

  void validate() const {
    if (!(eps1 > 0) || !(eps2 > 0) || !(eta > 1) || !(rho0 > 0) || !(lambda >= 0) ||
        max_outer_iters <= 0 || max_inner_iters <= 0 || !(newton_damping_delta > 0))
      throw std::invalid_argument("AdmmConfig: invalid parameter");
    if (delta1_stop && !(*delta1_stop > 0)) throw std::invalid_argument("AdmmConfig: delta1_stop");
    if (delta2_stop && !(*delta2_stop > 0)) throw std::invalid_argument("AdmmConfig: delta2_stop");
  }

  double stop1(Index n1, Index n2) const {
    return delta1_stop ? *delta1_stop : 10.0 * std::sqrt(double(n1) * double(n2) / 1e5);
  }
  double stop2(Index n1, Index n2) const {
    return delta2_stop ? *delta2_stop : 10.0 * std::sqrt(double(n1) * double(n2) / 1e5);
  }
};

/// One outer-iteration snapshot.
struct AdmmState {
  Matrix X;
  FactorPair factors;
  Matrix Lambda;
  double rho = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  int iter = 0;
};

struct IterationRecord {
  double delta1;
  double delta2;
  double rho;
  double objective;  // sum of observed losses + lambda * ||A||_0, feasible iterates
};

struct SubsolveResult {
  Matrix value;
  int iters = 0;
  bool cap_reached = false;
};

struct AdmmResult {
  FactorPair factors;
  Matrix X;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int outer_iters = 0;
  int inner_cap_hits = 0;
};

/// Largest singular value by power iteration on the Gram matrix, with a
/// deterministic normalized all-ones start. Zero matrix yields 0.
inline double spectral_norm(const Matrix& D, double tol = 1e-12) {
  if (D.size() == 0 || D.norm() == 0.0) return 0.0;
  // Iterate on the smaller Gram matrix.
  const bool tall = D.rows() >= D.cols();
  const Matrix G = tall ? Matrix(D.transpose() * D) : Matrix(D * D.transpose());
  Vector v = Vector::Ones(G.rows()) / std::sqrt(double(G.rows()));
  double ev = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = G * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double ev_next = v.dot(G * v);
    if (std::abs(ev_next - ev) <= tol * std::max(1.0, std::abs(ev_next))) {
      ev = ev_next;
      break;
    }
    ev = ev_next;
  }
  return std::sqrt(std::max(ev, 0.0));
}

/// Constrained iterative hard thresholding for
///   min_A I_A(A) + lambda ||A||_0 + (rho/2) ||Z - D A||_F^2.
/// Gradient step with the exact majorizer step size 1/||D||_2^2, then entries
/// with |Y| <= sqrt(2 lambda / (rho ||D||_2^2)) are zeroed and survivors are
/// clamped onto the box (the per-entry quadratic argmin over an interval).
/// Starts from A = 0 (or the warm start, when given) and stops on relative
/// Frobenius change <= eps.
inline SubsolveResult solve_a_iht(const Matrix& D, const Matrix& Z, double lambda, double rho,
                                  const Box& a_box, double eps, int max_iters,
                                  std::vector<double>* objective_trace = nullptr,
                                  const Matrix* warm_start = nullptr) {
  if (!(rho > 0) || !(lambda >= 0)) throw std::invalid_argument("solve_a_iht: bad penalty params");
  if (!a_box.contains(0.0)) throw std::invalid_argument("solve_a_iht: box must contain 0");
  const double snorm = spectral_norm(D);
  if (snorm == 0.0) throw std::invalid_argument("solve_a_iht: D must be nonzero");
  const double s2 = snorm * snorm;
  const double thresh = std::sqrt(2.0 * lambda / (rho * s2));

  const Matrix G = D.transpose() * D;  // r x r
  const Matrix C = D.transpose() * Z;  // r x n2
  Matrix A = warm_start ? *warm_start : Matrix::Zero(D.cols(), Z.cols());

  SubsolveResult out;
  out.cap_reached = true;
  for (int it = 0; it < max_iters; ++it) {
    Matrix Y = A - (G * A - C) / s2;
    for (Index j = 0; j < Y.cols(); ++j) {
      for (Index i = 0; i < Y.rows(); ++i) {
        double v = Y(i, j);
        v = std::abs(v) <= thresh ? 0.0 : a_box.clamp(v);
        Y(i, j) = v;
      }
    }
    const double change = (Y - A).norm();
    const double base = A.norm();
    A.swap(Y);
    out.iters = it + 1;
    if (objective_trace) {
      const double nnz = double((A.array() != 0.0).count());
      objective_trace->push_back(lambda * nnz + 0.5 * rho * (Z - D * A).squaredNorm());
    }
    const bool done = base > 0.0 ? (change / base <= eps) : (change == 0.0);
    if (done) {
      out.cap_reached = false;
      break;
    }
  }
  out.value = std::move(A);
  return out;
}

/// Projected Newton iteration for min_D I_D(D) + (rho/2) ||Z - D A||_F^2:
///   D <- Proj_D[ D - rho (D A - Z) A^T (rho A A^T + delta I)^{-1} ].
/// Starts from D = 0 (or the warm start, when given) and stops on relative
/// Frobenius change <= eps.
inline SubsolveResult solve_d_newton(const Matrix& A, const Matrix& Z, double rho,
                                     const Box& d_box, double eps, double delta, int max_iters,
                                     const Matrix* warm_start = nullptr) {
  if (!(rho > 0) || !(delta > 0)) throw std::invalid_argument("solve_d_newton: bad params");
  const Index r = A.rows();
  const Matrix S = A * A.transpose();                        // r x r
  const Matrix T = Z * A.transpose();                        // n1 x r
  Matrix H = rho * S + delta * Matrix::Identity(r, r);
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("solve_d_newton: linear solve failed");
  // Right-multiplication by H^{-1}: solve H^T W^T = step^T.
  Matrix D = warm_start ? *warm_start : Matrix::Zero(Z.rows(), r);

  SubsolveResult out;
  out.cap_reached = true;
  for (int it = 0; it < max_iters; ++it) {
    const Matrix grad = rho * (D * S - T);  // rho (D A - Z) A^T
    Matrix Dn = D - llt.solve(grad.transpose()).transpose();
    project_box_inplace(Dn, d_box);
    const double change = (Dn - D).norm();
    const double base = D.norm();
    D.swap(Dn);
    out.iters = it + 1;
    const bool done = base > 0.0 ? (change / base <= eps) : (change == 0.0);
    if (done) {
      out.cap_reached = false;
      break;
    }
  }
  out.value = std::move(D);
  return out;
}

/// Entry-wise X-update: observed entries apply the likelihood prox of
/// z = (D A)_{ij} - Lambda_{ij} / rho, unobserved entries take the clamped
/// target directly. Pure per-entry computation.
inline Matrix update_x(const Problem& problem, const AdmmState& state) {
  const Matrix P = state.factors.product();
  Matrix X = project_box(P - state.Lambda / state.rho, problem.x_box);
  const auto& ent = problem.mask.entries();
  for (size_t t = 0; t < ent.size(); ++t) {
    const auto [i, j] = ent[t];
    const double z = P(i, j) - state.Lambda(i, j) / state.rho;
    X(i, j) = problem.x_box.clamp(problem.likelihood.prox(z, state.rho, problem.observations[t]));
  }
  return X;
}

using ASubsolver = std::function<SubsolveResult(const Matrix& D, const Matrix& Z, double lambda,
                                                double rho, const Box& a_box, double eps,
                                                int max_iters, const Matrix* warm_start)>;

/// ADMM outer loop: X prox step, A subsolve, D subsolve, dual ascent, and the
/// rho adaptation eta*rho if delta1 >= 10 delta2, rho/eta if delta2 >= 10
/// delta1. Terminates when delta1 <= delta1_stop and delta2 <= delta2_stop,
/// or at the iteration cap (converged = false). When init is absent, D starts
/// uniform over d_box from the given generator and A starts at zero.
/// The subsolvers are warm-started from the current outer iterate: restarting
/// them at zero makes successive products swing, which keeps the
/// delta1/delta2 ratio inside the adaptation band and freezes rho far below
/// any usable coupling strength.
/// Deterministic for a fixed (problem, config, seed).
inline AdmmResult admm_solve_with(const Problem& problem, const AdmmConfig& config,
                                  std::optional<FactorPair> init, std::mt19937_64& rng,
                                  const ASubsolver& a_step,
                                  const std::function<void(const AdmmState&)>& observer = {}) {
  config.validate();
  if (problem.mask.size() < 1) throw std::invalid_argument("admm_solve: mask must be nonempty");
  const Index n1 = problem.rows(), n2 = problem.cols(), r = problem.r;
  const double d1_stop = config.stop1(n1, n2);
  const double d2_stop = config.stop2(n1, n2);

  AdmmState state;
  if (init) {
    if (init->D.rows() != n1 || init->D.cols() != r || init->A.rows() != r || init->A.cols() != n2)
      throw std::invalid_argument("admm_solve: init has wrong dimensions");
    state.factors = *init;
  } else {
    std::uniform_real_distribution<double> u(problem.d_box.lo, problem.d_box.hi);
    Matrix D0(n1, r);
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < r; ++j) D0(i, j) = u(rng);
    state.factors = FactorPair(std::move(D0), Matrix::Zero(r, n2));
  }
  state.Lambda = Matrix::Zero(n1, n2);
  state.rho = config.rho0;

  AdmmResult result;
  result.trace.reserve(static_cast<size_t>(config.max_outer_iters));
  Matrix prev_product = state.factors.product();

  for (int k = 0; k < config.max_outer_iters; ++k) {
    state.iter = k;
    try {
      state.X = update_x(problem, state);
      SubsolveResult a = a_step(state.factors.D, state.X + state.Lambda / state.rho,
                                config.lambda, state.rho, problem.a_box, config.eps1,
                                config.max_inner_iters, &state.factors.A);
      if (a.cap_reached) ++result.inner_cap_hits;
      state.factors.A = std::move(a.value);
      if ((state.factors.A.array() != 0.0).count() == 0) {
        // A = 0 makes the D-step objective constant in D; keep the previous
        // feasible iterate so the next IHT step size 1/||D||_2^2 stays defined.
      } else {
        SubsolveResult d = solve_d_newton(state.factors.A, state.X + state.Lambda / state.rho,
                                          state.rho, problem.d_box, config.eps2,
                                          config.newton_damping_delta, config.max_inner_iters,
                                          &state.factors.D);
        if (d.cap_reached) ++result.inner_cap_hits;
        state.factors.D = std::move(d.value);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("admm_solve: iteration " + std::to_string(k) + ": " + e.what());
    }

    const Matrix product = state.factors.product();
    state.Lambda += state.rho * (state.X - product);
    state.delta1 = (state.X - product).norm();
    state.delta2 = state.rho * (prev_product - product).norm();
    prev_product = product;

    const double nnz = double((state.factors.A.array() != 0.0).count());
    result.trace.push_back({state.delta1, state.delta2, state.rho,
                            problem.data_loss(state.X) + config.lambda * nnz});
    if (observer) observer(state);

    if (state.delta1 >= 10.0 * state.delta2)
      state.rho *= config.eta;
    else if (state.delta2 >= 10.0 * state.delta1)
      state.rho /= config.eta;
    else if (state.delta1 > d1_stop)
      // Progress guard: with the residual ratio inside the adaptation band
      // the two-sided rule would freeze rho, and from rho0 << 1 the coupling
      // then never reaches a strength where delta1 can meet its target.
      state.rho *= config.eta;

    result.outer_iters = k + 1;
    if (state.delta1 <= d1_stop && state.delta2 <= d2_stop) {
      result.converged = true;
      break;
    }
  }

  result.factors = std::move(state.factors);
  result.X = std::move(state.X);
  return result;
}

inline AdmmResult admm_solve(const Problem& problem, const AdmmConfig& config,
                             std::optional<FactorPair> init, std::mt19937_64& rng,
                             const std::function<void(const AdmmState&)>& observer = {}) {
  const ASubsolver iht = [](const Matrix& D, const Matrix& Z, double lambda, double rho,
                            const Box& a_box, double eps, int max_iters, const Matrix* warm) {
    return solve_a_iht(D, Z, lambda, rho, a_box, eps, max_iters, nullptr, warm);
  };
  return admm_solve_with(problem, config, std::move(init), rng, iht, observer);
}

}  // namespace sfmc
