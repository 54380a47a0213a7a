#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "sfmc/likelihoods.hpp"

namespace sfmc {

/// Inputs to the error-bound calculators. Exactly one of a_l0 (sparse case)
/// or p (weak-lp case) must be set.
struct BoundInputs {
  Index n1 = 0, n2 = 0, r = 0;
  long m = 0;  // nominal observation count, gamma * n1 * n2
  std::optional<long> a_l0;
  std::optional<double> p;
  double a_max = 1.0;
  double x_max = 1.0;
  std::optional<double> x_min;
  Likelihood noise = Likelihood::gaussian(1.0);

  void validate() const {
    if (n1 <= 0 || n2 <= 0 || r <= 0 || m <= 0) throw std::invalid_argument("BoundInputs: dims");
    if (m > n1 * n2) throw std::invalid_argument("BoundInputs: m exceeds n1*n2");
    if (!(a_max > 0.0) || a_max > double(std::max(n1, n2)))
      throw std::invalid_argument("BoundInputs: need 0 < Amax <= max(n1, n2)");
    if (!(x_max >= 1.0)) throw std::invalid_argument("BoundInputs: need Xmax >= 1");
    if (a_l0.has_value() == p.has_value())
      throw std::invalid_argument("BoundInputs: set exactly one of a_l0 or p");
    if (a_l0 && *a_l0 < 0) throw std::invalid_argument("BoundInputs: a_l0 < 0");
    if (p && !(*p > 0.0 && *p <= 1.0)) throw std::invalid_argument("BoundInputs: p in (0, 1]");
  }

  double log_nmax() const { return std::log(double(std::max(n1, n2))); }
};

/// beta = max{1, 1 + log(8 r Amax / Xmax) / log(n1 v n2)}, the discretization
/// depth entering the penalty weight.
inline double compute_beta(const BoundInputs& in) {
  in.validate();
  return std::max(1.0, 1.0 + std::log(8.0 * double(in.r) * in.a_max / in.x_max) / in.log_nmax());
}

/// lambda = 2 (1 + 2 C_D / 3) (beta + 2) log(n1 v n2).
inline double compute_lambda(const BoundInputs& in, double beta) {
  in.validate();
  const double cd = in.noise.cd_constant(Box(-in.x_max, in.x_max), in.x_min);
  return 2.0 * (1.0 + 2.0 * cd / 3.0) * (beta + 2.0) * in.log_nmax();
}

/// Best k-term approximation error bound for a weak-lp vector of radius R:
/// ||x - x^(k)||_q <= R C_{p,q} k^{1/q - 1/p} with C_{p,q} = (p/(q-p))^{1/q}
/// (which is <= 1 whenever q >= 2p).
inline double weak_lp_approx_error(double R, double p, int k, double q) {
  if (!(R > 0.0) || !(p > 0.0 && p <= 1.0) || k < 1) throw std::invalid_argument("weak_lp_approx_error: bad inputs");
  if (!(q > p)) throw std::invalid_argument("weak_lp_approx_error: need q > p");
  const double c = std::pow(p / (q - p), 1.0 / q);
  return R * c * std::pow(double(k), 1.0 / q - 1.0 / p);
}

/// Evaluated right-hand side of a corollary error bound, with the
/// intermediates used to build it.
struct BoundValue {
  double value = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double cd = 0.0;
};

/// Per-element mean-square error bound for the chosen likelihood, with the
/// explicit leading constants of the detailed derivations rather than the
/// big-O statements. The weak-lp variants substitute the balancing k, giving
/// the (n2/m)^(2a/(2a+1)) terms with a = 1/p - 1/2 (a' = 1/p - 1 for
/// Laplace, which also requires p <= 1/2).
inline BoundValue corollary_bound(const BoundInputs& in) {
  in.validate();
  BoundValue out;
  out.beta = compute_beta(in);
  out.lambda = compute_lambda(in, out.beta);
  out.cd = in.noise.cd_constant(Box(-in.x_max, in.x_max), in.x_min);

  const double m = double(in.m);
  const double L = in.log_nmax();
  const double logm = std::log(m);
  const double n1r = double(in.n1) * double(in.r);
  const double xm = in.x_max;
  const double bL = (out.beta + 2.0) * L;
  const bool sparse = in.a_l0.has_value();
  const double dof = sparse ? (n1r + double(*in.a_l0)) / m : 0.0;

  switch (in.noise.kind()) {
    case NoiseKind::Gaussian: {
      const double sg = in.noise.sigma();
      const double rate = 8.0 * (3.0 * sg * sg + 8.0 * xm * xm) * bL;
      if (sparse) {
        out.value = 70.0 * xm * xm * logm / m + rate * dof;
      } else {
        const double alpha = 1.0 / *in.p - 0.5;
        const double decay = std::pow(double(in.n2) / m, 2.0 * alpha / (2.0 * alpha + 1.0));
        out.value = 88.0 * xm * xm * logm / m + rate * n1r / m +
                    (24.0 * in.a_max * in.a_max + rate) * decay;
      }
      break;
    }
    case NoiseKind::Laplace: {
      const double tau = in.noise.tau();
      const double lead = (tau * xm + 1.0) * (tau * xm + 1.0) / (tau * tau);
      const double rate = 12.0 * lead * (2.0 + 16.0 * tau * xm / 3.0) * bL;
      const double head = 76.0 * lead * tau * xm * logm / m;
      if (sparse) {
        out.value = head + rate * dof;
      } else {
        if (!(*in.p <= 0.5))
          throw std::invalid_argument("corollary_bound: Laplace weak-lp requires p <= 1/2");
        const double alpha_p = 1.0 / *in.p - 1.0;
        const double decay = std::pow(double(in.n2) / m, alpha_p / (alpha_p + 1.0));
        out.value = head + rate * n1r / m +
                    12.0 * lead * (tau * in.a_max + (2.0 + 16.0 * tau * xm / 3.0) * bL) * decay;
      }
      break;
    }
    case NoiseKind::Poisson: {
      if (!in.x_min) throw std::invalid_argument("corollary_bound: Poisson requires x_min");
      const double xmin = *in.x_min;
      const double head = 128.0 * xm * xm * xm * logm / (xmin * m);
      const double lead = 12.0 * xm / xmin;
      const double rate = out.lambda + 16.0 * xm * xm * bL / 3.0;
      if (sparse) {
        out.value = head + lead * (xm * xm / m + rate * dof);
      } else {
        const double alpha = 1.0 / *in.p - 0.5;
        const double decay = std::pow(double(in.n2) / m, 2.0 * alpha / (2.0 * alpha + 1.0));
        out.value = head + lead * (4.0 * xm * xm / m + rate * n1r / m +
                                   (4.0 * in.a_max * in.a_max + rate) * decay);
      }
      break;
    }
    case NoiseKind::OneBit: {
      const auto [c, c_prime] = in.noise.one_bit_c_constants(xm);
      const double ratio = c / c_prime;
      const double head = ratio * 128.0 * xm * xm * logm / m;
      const double rate = out.lambda / c + 8.0 * xm * xm * bL / 3.0;
      if (sparse) {
        out.value = head + 24.0 * ratio * (xm * xm / m + rate * dof);
      } else {
        const double alpha = 1.0 / *in.p - 0.5;
        const double decay = std::pow(double(in.n2) / m, 2.0 * alpha / (2.0 * alpha + 1.0));
        out.value = head + 24.0 * ratio * (4.0 * xm * xm / m + rate * n1r / m +
                                           (4.0 * in.a_max * in.a_max + rate) * decay);
      }
      break;
    }
  }
  return out;
}

}  // namespace sfmc
