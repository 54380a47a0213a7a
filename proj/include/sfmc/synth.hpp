#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "sfmc/core.hpp"
#include "sfmc/problem.hpp"

namespace sfmc {

enum class CoefficientModel { ExactSparse, WeakLp };

/// Recipe for a synthetic ground truth X* = D* A*.
struct GroundTruthSpec {
  Index n1 = 0, n2 = 0, r = 0;
  CoefficientModel model = CoefficientModel::ExactSparse;
  int k = 1;          // nonzeros per column (ExactSparse)
  double p = 1.0;     // weak-lp decay exponent (WeakLp), p in (0, 1]
  Box d_box_true{-1.0, 1.0};
  Box a_box_true{-20.0, 20.0};
  bool nonnegative = false;  // Poisson mode: coefficient signs suppressed

  void validate() const {
    if (n1 <= 0 || n2 <= 0 || r <= 0 || r > n2)
      throw std::invalid_argument("GroundTruthSpec: need positive dims with r <= n2");
    if (model == CoefficientModel::ExactSparse && (k < 1 || k > r))
      throw std::invalid_argument("GroundTruthSpec: need 1 <= k <= r");
    if (model == CoefficientModel::WeakLp && !(p > 0.0 && p <= 1.0))
      throw std::invalid_argument("GroundTruthSpec: need p in (0, 1]");
  }
};

/// D*: scaled Gaussian entries clamped onto the true box.
/// Sparse A*: Gaussian entries scaled by (hi - lo)/3 and clamped, then r - k
/// random locations per column zeroed, leaving exactly k nonzeros (entries
/// that land exactly on zero in nonnegative mode are redrawn).
/// Weak-lp A*: each column is a random permutation of {Amax * i^(-1/p)} with
/// random signs, signs suppressed in nonnegative mode.
inline FactorPair generate_ground_truth(const GroundTruthSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix D(spec.n1, spec.r);
  const double d_scale = spec.d_box_true.width();
  for (Index i = 0; i < spec.n1; ++i)
    for (Index j = 0; j < spec.r; ++j) D(i, j) = spec.d_box_true.clamp(d_scale * gauss(rng));

  Matrix A = Matrix::Zero(spec.r, spec.n2);
  if (spec.model == CoefficientModel::ExactSparse) {
    const double a_scale = spec.a_box_true.width() / 3.0;
    for (Index i = 0; i < spec.r; ++i)
      for (Index j = 0; j < spec.n2; ++j) A(i, j) = spec.a_box_true.clamp(a_scale * gauss(rng));
    std::vector<Index> idx(spec.r);
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index j = 0; j < spec.n2; ++j) {
      std::shuffle(idx.begin(), idx.end(), rng);
      for (int t = spec.k; t < spec.r; ++t) A(idx[t], j) = 0.0;
      for (int t = 0; t < spec.k; ++t)
        while (A(idx[t], j) == 0.0) A(idx[t], j) = spec.a_box_true.clamp(a_scale * gauss(rng));
    }
  } else {
    const double a_max = spec.a_box_true.abs_max();
    std::vector<Index> idx(spec.r);
    std::iota(idx.begin(), idx.end(), Index{0});
    std::uniform_int_distribution<int> coin(0, 1);
    for (Index j = 0; j < spec.n2; ++j) {
      std::shuffle(idx.begin(), idx.end(), rng);
      for (Index t = 0; t < spec.r; ++t) {
        const double mag = a_max * std::pow(double(t + 1), -1.0 / spec.p);
        const double sign = spec.nonnegative ? 1.0 : (coin(rng) ? 1.0 : -1.0);
        A(idx[t], j) = sign * mag;
      }
    }
  }
  return FactorPair(std::move(D), std::move(A));
}

/// Independent Bernoulli(gamma) sampling of the n1 x n2 grid.
inline SampleMask sample_mask(Index n1, Index n2, double gamma, std::mt19937_64& rng) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("sample_mask: gamma in (0, 1]");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<Index, Index>> entries;
  entries.reserve(static_cast<size_t>(gamma * double(n1) * double(n2) * 1.1) + 16);
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < n2; ++j)
      if (u(rng) < gamma) entries.emplace_back(i, j);
  return SampleMask(n1, n2, std::move(entries));
}

/// Estimation-side X box derived from the realized ground truth, following
/// the experiment convention [2 Xmin*, 2 Xmax*] (the lower end halved instead
/// of doubled when Xmin* is nonnegative, so the truth stays feasible);
/// nonnegative mode pins the lower end at 0.
inline Box derive_x_box(const Matrix& X_true, bool nonnegative) {
  const double x_min = X_true.minCoeff();
  const double x_max = X_true.maxCoeff();
  if (nonnegative) return Box(0.0, 2.0 * x_max);
  const double lo = x_min < 0.0 ? 2.0 * x_min : 0.5 * x_min;
  return Box(lo, 2.0 * x_max);
}

/// Draw one observation per mask entry at the true values X* = D* A* and
/// assemble the completion problem with the given feasible boxes.
inline Problem generate_observations(const FactorPair& truth, const SampleMask& mask,
                                     const Likelihood& model, const Box& x_box, const Box& d_box,
                                     const Box& a_box, std::mt19937_64& rng) {
  const Matrix X = truth.product();
  if (X.rows() != mask.rows() || X.cols() != mask.cols())
    throw std::invalid_argument("generate_observations: mask shape differs from truth");
  std::vector<double> obs;
  obs.reserve(static_cast<size_t>(mask.size()));
  for (const auto& [i, j] : mask.entries()) {
    const double x = X(i, j);
    if (model.kind() == NoiseKind::Poisson && x < 0.0)
      throw std::invalid_argument("generate_observations: negative rate at entry (" +
                                  std::to_string(i) + ", " + std::to_string(j) + ")");
    obs.push_back(model.sample(x, rng));
  }
  return Problem(mask, std::move(obs), model, x_box, d_box, a_box, truth.rank());
}

}  // namespace sfmc
