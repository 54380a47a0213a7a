#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sfmc/theory.hpp"

using namespace sfmc;

namespace {

BoundInputs gaussian_inputs() {
  BoundInputs in;
  in.n1 = 100;
  in.n2 = 1000;
  in.r = 20;
  in.m = 100000;
  in.a_l0 = 8000;
  in.a_max = 20.0;
  in.x_max = 2.0;
  in.noise = Likelihood::gaussian(1.0);
  return in;
}

}  // namespace

TEST(ComputeBeta, ClampsAtOne) {
  BoundInputs in = gaussian_inputs();
  in.r = 1;
  in.a_max = 1.0;
  in.x_max = 8.0;  // 8 r Amax == Xmax, log term zero
  EXPECT_DOUBLE_EQ(compute_beta(in), 1.0);
  in.x_max = 100.0;  // 8 r Amax < Xmax, max clamps
  EXPECT_DOUBLE_EQ(compute_beta(in), 1.0);
}

TEST(ComputeBeta, DirectEvaluation) {
  const BoundInputs in = gaussian_inputs();
  const double want = 1.0 + std::log(8.0 * 20.0 * 20.0 / 2.0) / std::log(1000.0);
  EXPECT_NEAR(compute_beta(in), want, 1e-14);
  EXPECT_NEAR(compute_beta(in), 2.06804, 1e-5);
}

TEST(ComputeLambda, NearZeroCdLimit) {
  BoundInputs in;
  in.n1 = 20;
  in.n2 = 4;
  in.r = 1;
  in.m = 60;
  in.a_l0 = 3;
  in.a_max = 1.0;
  in.x_max = 8.0;  // beta = 1
  in.noise = Likelihood::gaussian(1e9);
  const double beta = compute_beta(in);
  EXPECT_DOUBLE_EQ(beta, 1.0);
  EXPECT_NEAR(compute_lambda(in, beta), 2.0 * 3.0 * std::log(20.0), 1e-9);
}

TEST(ComputeLambda, PaperPlugIn) {
  BoundInputs in;
  in.n1 = 1000;
  in.n2 = 10;
  in.r = 1;
  in.m = 5000;
  in.a_l0 = 10;
  in.a_max = 0.125;  // 8 r Amax = Xmax keeps beta at 1
  in.x_max = 1.0;
  in.noise = Likelihood::gaussian(1.0);  // C_D = 2
  const double beta = compute_beta(in);
  EXPECT_DOUBLE_EQ(beta, 1.0);
  EXPECT_NEAR(compute_lambda(in, beta), 96.708, 5e-3);
  EXPECT_NEAR(compute_lambda(in, beta), 2.0 * (1.0 + 4.0 / 3.0) * 3.0 * std::log(1000.0), 1e-10);
}

TEST(ComputeLambda, MonotoneInCd) {
  BoundInputs lo = gaussian_inputs();
  BoundInputs hi = gaussian_inputs();
  hi.noise = Likelihood::gaussian(0.5);  // larger C_D
  const double beta = compute_beta(lo);
  EXPECT_LT(compute_lambda(lo, beta), compute_lambda(hi, beta));
}

TEST(WeakLp, BoundaryConstantIsOne) {
  // q = 2p makes C_{p,q} = 1 exactly.
  EXPECT_NEAR(weak_lp_approx_error(3.0, 0.5, 7, 1.0), 3.0 * std::pow(7.0, 1.0 - 2.0), 1e-14);
}

TEST(WeakLp, DirectEvaluation) {
  EXPECT_DOUBLE_EQ(weak_lp_approx_error(1.0, 1.0, 4, 2.0), 0.5);
}

TEST(WeakLp, NonIncreasingInK) {
  double prev = kInf;
  for (int k = 1; k <= 30; ++k) {
    const double b = weak_lp_approx_error(2.0, 0.5, k, 2.0);
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(WeakLp, RejectsQNotAboveP) {
  EXPECT_THROW(weak_lp_approx_error(1.0, 1.0, 3, 1.0), std::invalid_argument);
  EXPECT_THROW(weak_lp_approx_error(1.0, 1.0, 3, 0.5), std::invalid_argument);
}

TEST(WeakLp, DominatesMeasuredTailOnSyntheticSequences) {
  std::mt19937_64 rng(71);
  const double R = 5.0, p = 1.0 / 3.0;
  const int n = 40;
  std::vector<double> mags(n);
  for (int i = 0; i < n; ++i) mags[i] = R * std::pow(double(i + 1), -1.0 / p);
  std::uniform_int_distribution<int> kdist(1, n - 1);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> x = mags;
    std::shuffle(x.begin(), x.end(), rng);
    for (double& v : x)
      if (rng() & 1) v = -v;
    const int k = kdist(rng);
    // Measured l2 error of the best k-term approximation.
    std::vector<double> abs_sorted(n);
    for (int i = 0; i < n; ++i) abs_sorted[i] = std::abs(x[i]);
    std::sort(abs_sorted.begin(), abs_sorted.end(), std::greater<>());
    double tail = 0.0;
    for (int i = k; i < n; ++i) tail += abs_sorted[i] * abs_sorted[i];
    EXPECT_LE(std::sqrt(tail), weak_lp_approx_error(R, p, k, 2.0) + 1e-12);
  }
}

TEST(CorollaryBound, GaussianSparseMatchesIndependentRecomputation) {
  const BoundInputs in = gaussian_inputs();
  const double m = 1e5, L = std::log(1000.0), sigma = 1.0, xmax = 2.0;
  const double beta = 1.0 + std::log(8.0 * 20.0 * 20.0 / 2.0) / std::log(1000.0);
  const double want = 70.0 * xmax * xmax * std::log(m) / m +
                      8.0 * (3.0 * sigma * sigma + 8.0 * xmax * xmax) * (beta + 2.0) * L *
                          (100.0 * 20.0 + 8000.0) / m;
  const BoundValue got = corollary_bound(in);
  EXPECT_NEAR(got.value / want, 1.0, 1e-10);
}

TEST(CorollaryBound, ZeroSparsityPlugIn) {
  BoundInputs in = gaussian_inputs();
  in.a_l0 = 0;
  const BoundValue got = corollary_bound(in);
  const double m = double(in.m), L = std::log(1000.0);
  const double beta = compute_beta(in);
  const double head = 70.0 * 4.0 * std::log(m) / m;
  const double rate = 8.0 * (3.0 + 32.0) * (beta + 2.0) * L * (100.0 * 20.0) / m;
  EXPECT_NEAR(got.value, head + rate, 1e-12 * got.value);
}

TEST(CorollaryBound, GaussianWeakLpMatchesIndependentRecomputation) {
  BoundInputs in = gaussian_inputs();
  in.a_l0.reset();
  in.p = 1.0 / 3.0;
  const double m = 1e5, L = std::log(1000.0), xmax = 2.0, amax = 20.0;
  const double beta = compute_beta(in);
  const double alpha = 3.0 - 0.5;
  const double rate = 8.0 * (3.0 + 8.0 * xmax * xmax) * (beta + 2.0) * L;
  const double want = 88.0 * xmax * xmax * std::log(m) / m + rate * 2000.0 / m +
                      (24.0 * amax * amax + rate) * std::pow(1000.0 / m, 2 * alpha / (2 * alpha + 1));
  EXPECT_NEAR(corollary_bound(in).value / want, 1.0, 1e-12);
}

TEST(CorollaryBound, LaplaceSparseMatchesIndependentRecomputation) {
  BoundInputs in = gaussian_inputs();
  const double tau = std::sqrt(2.0);
  in.noise = Likelihood::laplace(tau);
  const double m = 1e5, L = std::log(1000.0), xmax = 2.0;
  const double beta = compute_beta(in);
  const double lead = (tau * xmax + 1.0) * (tau * xmax + 1.0) / (tau * tau);
  const double want = 76.0 * lead * tau * xmax * std::log(m) / m +
                      12.0 * lead * (2.0 + 16.0 * tau * xmax / 3.0) * (beta + 2.0) * L *
                          (2000.0 + 8000.0) / m;
  EXPECT_NEAR(corollary_bound(in).value / want, 1.0, 1e-12);
}

TEST(CorollaryBound, LaplaceWeakLpRequiresSmallP) {
  BoundInputs in = gaussian_inputs();
  in.noise = Likelihood::laplace(1.0);
  in.a_l0.reset();
  in.p = 1.0;  // > 1/2 not covered by the Laplace corollary
  EXPECT_THROW(corollary_bound(in), std::invalid_argument);
  in.p = 1.0 / 3.0;
  EXPECT_GT(corollary_bound(in).value, 0.0);
}

TEST(CorollaryBound, PoissonNeedsXmin) {
  BoundInputs in = gaussian_inputs();
  in.noise = Likelihood::poisson();
  EXPECT_THROW(corollary_bound(in), std::invalid_argument);
  in.x_min = 0.5;
  const double got = corollary_bound(in).value;
  // Independent recomputation of the appendix-stage expression.
  const double m = 1e5, L = std::log(1000.0), xmax = 2.0, xmin = 0.5;
  const double beta = compute_beta(in);
  const double cd = 4.0 * xmax * xmax / xmin;
  const double lambda = 2.0 * (1.0 + 2.0 * cd / 3.0) * (beta + 2.0) * L;
  const double want = 128.0 * xmax * xmax * xmax * std::log(m) / (xmin * m) +
                      (12.0 * xmax / xmin) *
                          (xmax * xmax / m +
                           (lambda + 16.0 * xmax * xmax * (beta + 2.0) * L / 3.0) * 10000.0 / m);
  EXPECT_NEAR(got / want, 1.0, 1e-12);
}

TEST(CorollaryBound, OneBitMatchesIndependentRecomputation) {
  BoundInputs in = gaussian_inputs();
  in.noise = Likelihood::one_bit(LogisticLink(1.0));
  const double m = 1e5, L = std::log(1000.0), xmax = 2.0;
  const double beta = compute_beta(in);
  const auto [c, cp] = in.noise.one_bit_c_constants(xmax);
  const double cd = 2.0 * c * xmax * xmax;
  const double lambda = 2.0 * (1.0 + 2.0 * cd / 3.0) * (beta + 2.0) * L;
  const double want =
      (c / cp) * 128.0 * xmax * xmax * std::log(m) / m +
      24.0 * (c / cp) *
          (xmax * xmax / m +
           (lambda / c + 8.0 * xmax * xmax * (beta + 2.0) * L / 3.0) * 10000.0 / m);
  EXPECT_NEAR(corollary_bound(in).value / want, 1.0, 1e-12);
}

TEST(CorollaryBound, NonIncreasingInM) {
  BoundInputs in = gaussian_inputs();
  double prev = kInf;
  for (long m : {5000L, 10000L, 20000L, 40000L, 80000L}) {
    in.m = m;
    const double v = corollary_bound(in).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(CorollaryBound, RejectsAmbiguousSparsitySpec) {
  BoundInputs in = gaussian_inputs();
  in.p = 0.5;  // both a_l0 and p set
  EXPECT_THROW(corollary_bound(in), std::invalid_argument);
  in.a_l0.reset();
  in.p.reset();
  EXPECT_THROW(corollary_bound(in), std::invalid_argument);
}

TEST(Invariants, BetaAtLeastOneOnRandomInputs) {
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    BoundInputs in;
    in.n1 = 10 + long(unif(rng) * 500);
    in.n2 = 10 + long(unif(rng) * 500);
    in.r = 1 + long(unif(rng) * 9);
    in.m = std::max(1L, long(unif(rng) * in.n1 * in.n2));
    in.a_l0 = 5;
    in.a_max = 0.5 + unif(rng) * 9.5;
    in.x_max = 1.0 + unif(rng) * 9.0;
    in.noise = Likelihood::gaussian(0.5 + unif(rng));
    EXPECT_GE(compute_beta(in), 1.0);
  }
}
