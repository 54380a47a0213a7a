#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sfmc/likelihoods.hpp"

using namespace sfmc;

namespace {

double prox_objective(const Likelihood& lik, double y, double x, double z, double rho) {
  return lik.loss(y, x) + 0.5 * rho * (x - z) * (x - z);
}

// Bracket containing the prox minimizer for each model.
std::pair<double, double> prox_bracket(const Likelihood& lik, double y, double z, double rho) {
  switch (lik.kind()) {
    case NoiseKind::Gaussian:
    case NoiseKind::Laplace:
      return {std::min(y, z) - 1.0, std::max(y, z) + 1.0};
    case NoiseKind::Poisson:
      return {1e-14, std::max(z, 0.0) + std::sqrt(y / rho) + 1.0 / rho + 1.0};
    case NoiseKind::OneBit: {
      const double radius = 1.0 / (lik.link().s * rho) + 1.0;
      return {z - radius, z + radius};
    }
  }
  return {0, 0};
}

double prox_oracle(const Likelihood& lik, double y, double z, double rho) {
  auto [a, b] = prox_bracket(lik, y, z, rho);
  auto f = [&](double x) { return prox_objective(lik, y, x, z, rho); };
  return oracles::golden_section(f, a, b, 1e-8);
}

}  // namespace

TEST(Loss, TrivialValues) {
  EXPECT_DOUBLE_EQ(Likelihood::gaussian(1.0).loss(0.7, 0.7), 0.0);
  EXPECT_DOUBLE_EQ(Likelihood::poisson().loss(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(Likelihood::laplace(2.0).loss(0.0, 3.0), 6.0);
}

TEST(Loss, PoissonDomainSentinel) {
  EXPECT_EQ(Likelihood::poisson().loss(2.0, 0.0), kInf);
  EXPECT_EQ(Likelihood::poisson().loss(2.0, -1.0), kInf);
}

TEST(Loss, OneBitSaturationStaysFinite) {
  const Likelihood lik = Likelihood::one_bit(LogisticLink(0.05));
  EXPECT_TRUE(std::isfinite(lik.loss(1.0, -50.0)));
  EXPECT_TRUE(std::isfinite(lik.loss(0.0, 50.0)));
}

TEST(Prox, TrivialValues) {
  EXPECT_DOUBLE_EQ(Likelihood::gaussian(0.7).prox(1.3, 2.5, 1.3), 1.3);   // z = y fixed point
  EXPECT_DOUBLE_EQ(Likelihood::poisson().prox(1.0, 1.0, 1.0), 1.0);
  // Laplace subgradient optimality: |rho (y - z)| <= tau keeps the prox at y.
  EXPECT_DOUBLE_EQ(Likelihood::laplace(1.0).prox(0.8, 1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(Likelihood::laplace(1.0).prox(-0.9, 1.0, 0.0), 0.0);
}

TEST(Prox, MatchesGoldenSectionOracle) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  std::uniform_real_distribution<double> logrho(-3.0, 3.0);
  std::poisson_distribution<int> counts(3.0);
  const Likelihood models[] = {Likelihood::gaussian(0.7), Likelihood::laplace(1.3),
                               Likelihood::poisson(), Likelihood::one_bit(LogisticLink(0.3))};
  for (const Likelihood& lik : models) {
    for (int t = 0; t < 1000; ++t) {
      const double z = unif(rng);
      const double rho = std::pow(10.0, logrho(rng));
      double y = 0.0;
      switch (lik.kind()) {
        case NoiseKind::Gaussian:
        case NoiseKind::Laplace: y = unif(rng); break;
        case NoiseKind::Poisson: y = counts(rng); break;
        case NoiseKind::OneBit: y = (t % 2 == 0) ? 1.0 : 0.0; break;
      }
      const double got = lik.prox(z, rho, y);
      const double want = prox_oracle(lik, y, z, rho);
      EXPECT_NEAR(got, want, 1e-4) << noise_name(lik.kind()) << " y=" << y << " z=" << z
                                   << " rho=" << rho;
    }
  }
}

TEST(Prox, OptimalityAgainstRandomProbes) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  const Likelihood models[] = {Likelihood::gaussian(1.1), Likelihood::laplace(0.8),
                               Likelihood::poisson(), Likelihood::one_bit(LogisticLink(0.5))};
  for (const Likelihood& lik : models) {
    for (int t = 0; t < 30; ++t) {
      const double z = unif(rng);
      const double rho = std::exp(unif(rng) / 2.0);
      const double y = lik.kind() == NoiseKind::Poisson ? std::abs(std::floor(unif(rng)))
                       : lik.kind() == NoiseKind::OneBit ? double(t % 2) : unif(rng);
      const double p = lik.prox(z, rho, y);
      const double fp = prox_objective(lik, y, p, z, rho);
      auto [a, b] = prox_bracket(lik, y, z, rho);
      std::uniform_real_distribution<double> probe(a, b);
      for (int q = 0; q < 100; ++q) {
        const double x = probe(rng);
        EXPECT_LE(fp, prox_objective(lik, y, x, z, rho) + 1e-9);
      }
    }
  }
}

TEST(Prox, FirmlyNonexpansiveInZ) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  const Likelihood models[] = {Likelihood::gaussian(0.9), Likelihood::laplace(1.7),
                               Likelihood::poisson(), Likelihood::one_bit(LogisticLink(0.4))};
  for (const Likelihood& lik : models) {
    for (int t = 0; t < 200; ++t) {
      const double z1 = unif(rng), z2 = unif(rng);
      const double rho = std::exp(unif(rng) / 2.0);
      const double y = lik.kind() == NoiseKind::Poisson ? 2.0
                       : lik.kind() == NoiseKind::OneBit ? double(t % 2) : unif(rng);
      EXPECT_LE(std::abs(lik.prox(z1, rho, y) - lik.prox(z2, rho, y)),
                std::abs(z1 - z2) + 1e-7);
    }
  }
}

TEST(Prox, LaplaceOutputBetweenYAndZ) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  const Likelihood lik = Likelihood::laplace(1.2);
  for (int t = 0; t < 500; ++t) {
    const double y = unif(rng), z = unif(rng);
    const double rho = std::exp(unif(rng) / 2.0);
    const double p = lik.prox(z, rho, y);
    EXPECT_GE(p, std::min(y, z) - 1e-12);
    EXPECT_LE(p, std::max(y, z) + 1e-12);
  }
}

TEST(Kl, ZeroAtEqualParameters) {
  EXPECT_DOUBLE_EQ(Likelihood::gaussian(0.5).kl(1.2, 1.2), 0.0);
  EXPECT_DOUBLE_EQ(Likelihood::laplace(2.0).kl(-0.3, -0.3), 0.0);
  EXPECT_DOUBLE_EQ(Likelihood::poisson().kl(0.8, 0.8), 0.0);
  EXPECT_NEAR(Likelihood::one_bit(LogisticLink(1.0)).kl(0.4, 0.4), 0.0, 1e-15);
}

TEST(Kl, GaussianQuadratic) {
  EXPECT_DOUBLE_EQ(Likelihood::gaussian(1.0).kl(3.0, 1.0), 2.0);  // (2)^2 / 2
}

TEST(Kl, LaplaceClosedFormAndQuadratureAgree) {
  const double tau = 1.0;
  const Likelihood lik = Likelihood::laplace(tau);
  EXPECT_NEAR(lik.kl(1.0, 0.0), std::exp(-1.0), 1e-12);
  // Cross-check against numerical integration of the two Laplace densities.
  const double x1 = 0.6, x2 = -0.9;
  auto p = [&](double y) { return 0.5 * tau * std::exp(-tau * std::abs(y - x1)); };
  auto q = [&](double y) { return 0.5 * tau * std::exp(-tau * std::abs(y - x2)); };
  const double numeric =
      oracles::simpson([&](double y) { return p(y) * std::log(p(y) / q(y)); }, -30.0, 30.0, 20000);
  EXPECT_NEAR(lik.kl(x1, x2), numeric, 1e-6);
}

TEST(Kl, PoissonDomainErrors) {
  EXPECT_THROW(Likelihood::poisson().kl(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(Likelihood::poisson().kl(1.0, 0.0), std::invalid_argument);
}

TEST(NegLogAffinity, ZeroAtEqualParameters) {
  EXPECT_DOUBLE_EQ(Likelihood::gaussian(2.0).neg_log_affinity(0.4, 0.4), 0.0);
  EXPECT_DOUBLE_EQ(Likelihood::laplace(1.0).neg_log_affinity(1.1, 1.1), 0.0);
  EXPECT_DOUBLE_EQ(Likelihood::poisson().neg_log_affinity(2.0, 2.0), 0.0);
  EXPECT_NEAR(Likelihood::one_bit(LogisticLink(0.7)).neg_log_affinity(0.2, 0.2), 0.0, 1e-15);
}

TEST(NegLogAffinity, GaussianQuadratic) {
  EXPECT_DOUBLE_EQ(Likelihood::gaussian(1.0).neg_log_affinity(2.5, 0.5), 1.0);  // 4/4
}

TEST(NegLogAffinity, OneBitMatchesTwoTermSum) {
  const Likelihood lik = Likelihood::one_bit(LogisticLink(1.0));
  const double xs = 0.0, x = 0.5;
  auto F = [&](double t) { return 1.0 / (1.0 + std::exp(-t)); };
  const double aff = std::sqrt(F(xs) * F(x)) + std::sqrt((1 - F(xs)) * (1 - F(x)));
  EXPECT_NEAR(lik.neg_log_affinity(xs, x), -2.0 * std::log(aff), 1e-12);
}

TEST(InformationInequality, AffinityBoundedByKl) {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  std::uniform_real_distribution<double> pos(0.05, 6.0);
  const Likelihood models[] = {Likelihood::gaussian(0.8), Likelihood::laplace(1.4),
                               Likelihood::poisson(), Likelihood::one_bit(LogisticLink(0.6))};
  for (const Likelihood& lik : models) {
    for (int t = 0; t < 2000; ++t) {
      const bool poisson = lik.kind() == NoiseKind::Poisson;
      const double xs = poisson ? pos(rng) : unif(rng);
      const double x = poisson ? pos(rng) : unif(rng);
      EXPECT_LE(lik.neg_log_affinity(xs, x), lik.kl(xs, x) + 1e-12);
    }
  }
}

TEST(Sampler, GaussianMeanWithinClt) {
  std::mt19937_64 rng(606);
  const Likelihood lik = Likelihood::gaussian(0.5);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += lik.sample(1.0, rng);
  EXPECT_NEAR(sum / n, 1.0, 3.0 * 0.5 / std::sqrt(double(n)));
}

TEST(Sampler, LaplaceMeanAndVariance) {
  std::mt19937_64 rng(707);
  const double tau = 2.0;
  const Likelihood lik = Likelihood::laplace(tau);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = lik.sample(0.0, rng);
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 * std::sqrt(2.0 / (tau * tau)) / std::sqrt(double(n)));
  EXPECT_NEAR(sq / n, 2.0 / (tau * tau), 0.02);
}

TEST(Sampler, PoissonZeroRateDegenerate) {
  std::mt19937_64 rng(808);
  const Likelihood lik = Likelihood::poisson();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(lik.sample(0.0, rng), 0.0);
  EXPECT_THROW(lik.sample(-0.5, rng), std::invalid_argument);
}

TEST(Sampler, OneBitSymmetricAtZero) {
  std::mt19937_64 rng(909);
  const Likelihood lik = Likelihood::one_bit(LogisticLink(0.25));
  const int n = 100000;
  double ones = 0.0;
  for (int i = 0; i < n; ++i) ones += lik.sample(0.0, rng);
  EXPECT_NEAR(ones / n, 0.5, 3.0 / (2.0 * std::sqrt(double(n))));
}

TEST(CdConstant, ClosedForms) {
  EXPECT_DOUBLE_EQ(Likelihood::gaussian(1.0).cd_constant(Box(-1, 1)), 2.0);
  EXPECT_DOUBLE_EQ(Likelihood::laplace(2.0).cd_constant(Box(-3, 3)), 12.0);
  EXPECT_DOUBLE_EQ(Likelihood::poisson().cd_constant(Box(0, 2), 0.5), 32.0);
  EXPECT_THROW(Likelihood::poisson().cd_constant(Box(0, 2)), std::invalid_argument);
}

TEST(CdConstant, OneBitMatchesDenseGridOracle) {
  const double s = 1.0, xmax = 1.0;
  const Likelihood lik = Likelihood::one_bit(LogisticLink(s));
  // 10^5-point reference for the sup/inf constants.
  const int n = 100000;
  double sup_inv = 0.0, sup_f2 = 0.0, inf_ratio = kInf;
  for (int i = 0; i < n; ++i) {
    const double t = -xmax + 2.0 * xmax * i / (n - 1.0);
    const double F = 1.0 / (1.0 + std::exp(-t / s));
    const double f = std::exp(-t / s) / (s * std::pow(1.0 + std::exp(-t / s), 2.0));
    sup_inv = std::max(sup_inv, 1.0 / (F * (1.0 - F)));
    sup_f2 = std::max(sup_f2, f * f);
    inf_ratio = std::min(inf_ratio, f * f / (F * (1.0 - F)));
  }
  const double want_cd = 2.0 * sup_inv * sup_f2 * xmax * xmax;
  EXPECT_NEAR(lik.cd_constant(Box(-xmax, xmax)) / want_cd, 1.0, 1e-3);
  const auto [c, cp] = lik.one_bit_c_constants(xmax);
  EXPECT_NEAR(c / (sup_inv * sup_f2), 1.0, 1e-3);
  EXPECT_NEAR(cp / inf_ratio, 1.0, 1e-3);
}

TEST(CdConstant, DominatesKlOnCandidatePairs) {
  std::mt19937_64 rng(1111);
  const double xmax = 2.0;
  const Likelihood models[] = {Likelihood::gaussian(0.8), Likelihood::laplace(1.1),
                               Likelihood::poisson(), Likelihood::one_bit(LogisticLink(0.5))};
  for (const Likelihood& lik : models) {
    const bool poisson = lik.kind() == NoiseKind::Poisson;
    const double xmin = 0.2;
    const double cd = lik.cd_constant(Box(-xmax, xmax), poisson ? std::optional(xmin) : std::nullopt);
    std::uniform_real_distribution<double> xs_dist(poisson ? xmin : -xmax / 2, xmax / 2);
    std::uniform_real_distribution<double> x_dist(poisson ? xmin : -xmax, xmax);
    for (int t = 0; t < 500; ++t) {
      EXPECT_LE(lik.kl(xs_dist(rng), x_dist(rng)), cd + 1e-12) << noise_name(lik.kind());
    }
  }
}

TEST(LogisticLink, SymmetryAndScaleFromSigma) {
  const LogisticLink link = LogisticLink::from_sigma(0.1);
  EXPECT_NEAR(link.s, std::sqrt(3.0) * 0.1 / M_PI, 1e-15);
  EXPECT_NEAR(link.cdf(0.3) + link.cdf(-0.3), 1.0, 1e-12);
  EXPECT_GT(link.cdf(0.2), link.cdf(0.1));
  EXPECT_THROW(LogisticLink(0.0), std::invalid_argument);
}
