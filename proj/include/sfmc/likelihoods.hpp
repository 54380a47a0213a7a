#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "sfmc/core.hpp"

namespace sfmc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when an iterative scalar solve fails to reach its tolerance.
struct ProxNewtonError : std::runtime_error {
  double last_iterate;
  ProxNewtonError(const std::string& msg, double last)
      : std::runtime_error(msg), last_iterate(last) {}
};

/// Logistic link F(x) = 1 / (1 + exp(-x/s)) with scale s > 0.
/// F is strictly increasing and satisfies F(-x) = 1 - F(x).
struct LogisticLink {
  double s = 1.0;

  explicit LogisticLink(double scale = 1.0) : s(scale) {
    if (!(s > 0.0)) throw std::invalid_argument("LogisticLink: scale must be positive");
  }

  /// s derived from an equivalent additive-noise standard deviation sigma,
  /// s = sqrt(3) * sigma / pi (matches the logistic distribution's variance).
  static LogisticLink from_sigma(double sigma) {
    return LogisticLink(std::sqrt(3.0) * sigma / M_PI);
  }

  double cdf(double x) const {
    const double t = x / s;
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
  }

  // log F and log(1-F) computed without forming F, stable for |x/s| large.
  double log_cdf(double x) const {
    const double t = x / s;
    return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
  }
  double log_ccdf(double x) const { return log_cdf(-x); }

  double pdf(double x) const {
    const double t = std::abs(x) / s;
    const double e = std::exp(-t);
    const double denom = 1.0 + e;
    return e / (s * denom * denom);
  }
};

enum class NoiseKind { Gaussian, Laplace, Poisson, OneBit };

inline const char* noise_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Laplace: return "laplace";
    case NoiseKind::Poisson: return "poisson";
    case NoiseKind::OneBit: return "onebit";
  }
  return "?";
}

/// Per-entry observation model: negative log-likelihood loss, its proximal
/// operator, KL divergence, -2 log Hellinger affinity, a sampler, and the
/// uniform KL bound C_D used by the regularization-weight formula.
///
/// Immutable; all members are pure except sample(), which advances only the
/// caller's generator.
class Likelihood {
 public:
  static Likelihood gaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
    return Likelihood(NoiseKind::Gaussian, sigma);
  }
  static Likelihood laplace(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("laplace: tau must be positive");
    return Likelihood(NoiseKind::Laplace, tau);
  }
  static Likelihood poisson() { return Likelihood(NoiseKind::Poisson, 0.0); }
  static Likelihood one_bit(LogisticLink link) {
    Likelihood l(NoiseKind::OneBit, link.s);
    return l;
  }
  static Likelihood one_bit_from_sigma(double sigma) {
    return one_bit(LogisticLink::from_sigma(sigma));
  }

  NoiseKind kind() const { return kind_; }
  double sigma() const { return require(NoiseKind::Gaussian); }
  double tau() const { return require(NoiseKind::Laplace); }
  LogisticLink link() const {
    require(NoiseKind::OneBit);
    return LogisticLink(param_);
  }

  /// Negative log-likelihood l(y, x) up to y-only additive constants.
  double loss(double y, double x) const {
    switch (kind_) {
      case NoiseKind::Gaussian: {
        const double d = y - x;
        return d * d / (2.0 * param_ * param_);
      }
      case NoiseKind::Laplace:
        return param_ * std::abs(y - x);
      case NoiseKind::Poisson:
        if (x <= 0.0) return kInf;
        return x - y * std::log(x);
      case NoiseKind::OneBit: {
        const LogisticLink lk(param_);
        // Log arguments clamped away from {0, 1} so extreme iterates stay finite.
        const double lf = std::max(lk.log_cdf(x), std::log(1e-12));
        const double lc = std::max(lk.log_ccdf(x), std::log(1e-12));
        return -y * lf - (1.0 - y) * lc;
      }
    }
    return 0.0;
  }

  /// prox_l(z; rho, y) = argmin_x l(y, x) + (rho/2)(x - z)^2.
  double prox(double z, double rho, double y) const {
    if (!(rho > 0.0)) throw std::invalid_argument("prox: rho must be positive");
    switch (kind_) {
      case NoiseKind::Gaussian: {
        const double s2 = param_ * param_;
        return (y + s2 * rho * z) / (1.0 + s2 * rho);
      }
      case NoiseKind::Laplace:
        return y + soft_threshold(z - y, param_ / rho);
      case NoiseKind::Poisson: {
        if (y < 0.0) throw std::invalid_argument("prox: Poisson requires y >= 0");
        const double b = rho * z - 1.0;
        const double root = (b + std::sqrt(b * b + 4.0 * rho * y)) / (2.0 * rho);
        return std::max(root, 1e-12);  // keeps iterates in the open domain at y = 0
      }
      case NoiseKind::OneBit:
        return prox_one_bit(z, rho, y);
    }
    return 0.0;
  }

  /// D(p_{x_true} || p_x).
  double kl(double x_true, double x) const {
    switch (kind_) {
      case NoiseKind::Gaussian: {
        const double d = x_true - x;
        return d * d / (2.0 * param_ * param_);
      }
      case NoiseKind::Laplace: {
        const double t = param_ * std::abs(x_true - x);
        return t - (-std::expm1(-t));
      }
      case NoiseKind::Poisson: {
        if (!(x_true > 0.0) || !(x > 0.0))
          throw std::invalid_argument("kl: Poisson requires positive rates");
        return x_true * std::log(x_true / x) - x_true + x;
      }
      case NoiseKind::OneBit: {
        const LogisticLink lk(param_);
        // Bernoulli KL with F(x*) vs F(x), evaluated in log space.
        const double p1 = lk.cdf(x_true);
        return p1 * (lk.log_cdf(x_true) - lk.log_cdf(x)) +
               (1.0 - p1) * (lk.log_ccdf(x_true) - lk.log_ccdf(x));
      }
    }
    return 0.0;
  }

  /// -2 log A(p_{x_true}, p_x), the negative log Hellinger affinity.
  double neg_log_affinity(double x_true, double x) const {
    switch (kind_) {
      case NoiseKind::Gaussian: {
        const double d = x_true - x;
        return d * d / (4.0 * param_ * param_);
      }
      case NoiseKind::Laplace: {
        const double t = param_ * std::abs(x_true - x);
        return t - 2.0 * std::log1p(t / 2.0);
      }
      case NoiseKind::Poisson: {
        if (!(x_true > 0.0) || !(x > 0.0))
          throw std::invalid_argument("neg_log_affinity: Poisson requires positive rates");
        const double d = std::sqrt(x_true) - std::sqrt(x);
        return d * d;
      }
      case NoiseKind::OneBit: {
        const LogisticLink lk(param_);
        // A = sqrt(pi* pi) + sqrt((1-pi*)(1-pi)); log-sum-exp keeps extreme
        // saturations finite.
        const double a = 0.5 * (lk.log_cdf(x_true) + lk.log_cdf(x));
        const double b = 0.5 * (lk.log_ccdf(x_true) + lk.log_ccdf(x));
        const double m = std::max(a, b);
        const double log_aff = m + std::log(std::exp(a - m) + std::exp(b - m));
        return std::max(0.0, -2.0 * log_aff);
      }
    }
    return 0.0;
  }

  /// Draw one observation of the entry value x.
  double sample(double x, std::mt19937_64& rng) const {
    switch (kind_) {
      case NoiseKind::Gaussian: {
        std::normal_distribution<double> n(0.0, param_);
        return x + n(rng);
      }
      case NoiseKind::Laplace: {
        // Inverse-CDF of the Laplace(tau) density (tau/2) exp(-tau |w|).
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        const double v = u(rng);
        const double w = -std::copysign(std::log1p(-2.0 * std::abs(v)), v) / param_;
        return x + w;
      }
      case NoiseKind::Poisson: {
        if (x < 0.0) throw std::invalid_argument("sample: Poisson requires x >= 0");
        if (x == 0.0) return 0.0;
        std::poisson_distribution<long> p(x);
        return static_cast<double>(p(rng));
      }
      case NoiseKind::OneBit: {
        const LogisticLink lk(param_);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return u(rng) < lk.cdf(x) ? 1.0 : 0.0;
      }
    }
    return 0.0;
  }

  /// The corollary constant C_D bounding per-entry KL divergences over the
  /// candidate class implied by x_box. Poisson needs the minimum rate x_min.
  double cd_constant(const Box& x_box, std::optional<double> x_min = std::nullopt) const {
    const double xmax = x_box.abs_max();
    switch (kind_) {
      case NoiseKind::Gaussian:
        return 2.0 * xmax * xmax / (param_ * param_);
      case NoiseKind::Laplace:
        return 2.0 * param_ * xmax;
      case NoiseKind::Poisson:
        if (!x_min || !(*x_min > 0.0))
          throw std::invalid_argument("cd_constant: Poisson requires x_min > 0");
        return 4.0 * xmax * xmax / *x_min;
      case NoiseKind::OneBit:
        return 2.0 * one_bit_c_constants(xmax).first * xmax * xmax;
    }
    return 0.0;
  }

  /// (c_{F,Xmax}, c'_{F,Xmax}) for the one-bit corollary, evaluated by
  /// sup/inf over a 10^4-point grid on [-xmax, xmax].
  std::pair<double, double> one_bit_c_constants(double xmax) const {
    require(NoiseKind::OneBit);
    const LogisticLink lk(param_);
    const int n = 10000;
    double sup_inv_var = 0.0, sup_f2 = 0.0, inf_ratio = kInf;
    for (int i = 0; i < n; ++i) {
      const double t = -xmax + 2.0 * xmax * i / (n - 1.0);
      const double F = lk.cdf(t);
      const double f = lk.pdf(t);
      sup_inv_var = std::max(sup_inv_var, 1.0 / (F * (1.0 - F)));
      sup_f2 = std::max(sup_f2, f * f);
      inf_ratio = std::min(inf_ratio, f * f / (F * (1.0 - F)));
    }
    return {sup_inv_var * sup_f2, inf_ratio};
  }

  static double soft_threshold(double x, double t) {
    return std::copysign(std::max(std::abs(x) - t, 0.0), x);
  }

 private:
  Likelihood(NoiseKind k, double p) : kind_(k), param_(p) {}

  double require(NoiseKind k) const {
    if (kind_ != k) throw std::logic_error("Likelihood: parameter access for wrong model");
    return param_;
  }

  // Strictly convex scalar objective G(x) = l(y,x) + rho/2 (x-z)^2 solved by
  // safeguarded Newton: gradient -y/s + F(x)/s + rho(x-z), Hessian
  // F(x)(1-F(x))/s^2 + rho. Steps leaving the sign-change bracket fall back to
  // bisection. Stops when successive iterates differ by <= 1e-7.
  double prox_one_bit(double z, double rho, double y) const {
    const LogisticLink lk(param_);
    const double s = lk.s;
    auto grad = [&](double x) { return (lk.cdf(x) - y) / s + rho * (x - z); };
    // The stationary point satisfies rho |x - z| = |y - F(x)| / s <= 1/s.
    const double radius = 1.0 / (s * rho) + 1.0;
    double lo = z - radius, hi = z + radius;
    double x = z;
    double g = grad(x);
    if (g > 0.0) hi = x; else lo = x;
    for (int it = 0; it < 100; ++it) {
      const double F = lk.cdf(x);
      const double h = F * (1.0 - F) / (s * s) + rho;
      double x_next = x - g / h;
      // Accept the Newton step only when it stays inside the bracket and
      // shrinks it at least as fast as bisection; otherwise the logistic's
      // inflection can sustain a two-cycle.
      if (!(x_next > lo) || !(x_next < hi) || std::abs(x_next - x) > 0.5 * (hi - lo))
        x_next = 0.5 * (lo + hi);
      const double step = std::abs(x_next - x);
      x = x_next;
      g = grad(x);
      if (g > 0.0) hi = x; else lo = x;
      if (step <= 1e-7) return x;
    }
    throw ProxNewtonError("prox: one-bit Newton did not converge within 100 iterations", x);
  }

  NoiseKind kind_;
  double param_;  // sigma, tau, or link scale s; unused for Poisson
};

}  // namespace sfmc
