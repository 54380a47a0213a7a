#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "sfmc/core.hpp"
#include "sfmc/likelihoods.hpp"

namespace sfmc {

/// One estimation instance: sample locations, one observation per location,
/// the likelihood model, the feasible boxes, and the factor rank r.
/// Immutable after construction; validate() enforces the model-specific
/// observation invariants.
struct Problem {
  SampleMask mask;
  std::vector<double> observations;  // aligned with mask.entries()
  Likelihood likelihood;
  Box x_box;
  Box d_box;
  Box a_box;
  Index r = 1;

  Problem(SampleMask mask_, std::vector<double> obs, Likelihood lik, Box x, Box d, Box a, Index r_)
      : mask(std::move(mask_)),
        observations(std::move(obs)),
        likelihood(lik),
        x_box(x),
        d_box(d),
        a_box(a),
        r(r_) {
    validate();
  }

  Index rows() const { return mask.rows(); }
  Index cols() const { return mask.cols(); }

  void validate() const {
    if (r <= 0 || r > mask.cols()) throw std::invalid_argument("Problem: need 0 < r <= n2");
    if (observations.size() != static_cast<size_t>(mask.size()))
      throw std::invalid_argument("Problem: one observation required per mask entry");
    switch (likelihood.kind()) {
      case NoiseKind::Poisson:
        if (x_box.lo < 0.0) throw std::invalid_argument("Problem: Poisson requires x_box.lo >= 0");
        for (double y : observations)
          if (y < 0.0 || y != std::floor(y))
            throw std::invalid_argument("Problem: Poisson observations must be nonnegative integers");
        break;
      case NoiseKind::OneBit:
        for (double y : observations)
          if (y != 0.0 && y != 1.0)
            throw std::invalid_argument("Problem: one-bit observations must be 0 or 1");
        break;
      default:
        break;
    }
  }

  /// Sum of per-entry losses over the observed set at candidate X.
  double data_loss(const Matrix& X) const {
    double total = 0.0;
    const auto& ent = mask.entries();
    for (size_t t = 0; t < ent.size(); ++t)
      total += likelihood.loss(observations[t], X(ent[t].first, ent[t].second));
    return total;
  }
};

}  // namespace sfmc
