#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sfmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Closed interval [lo, hi] used for the entry-wise feasible sets of X, D, A.
struct Box {
  double lo = 0.0;
  double hi = 0.0;

  Box() = default;
  Box(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("Box: requires finite lo <= hi");
  }

  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return std::min(hi, std::max(lo, x)); }
  double width() const { return hi - lo; }
  /// Largest magnitude attainable inside the box.
  double abs_max() const { return std::max(std::abs(lo), std::abs(hi)); }
};

/// Set of observed (row, col) locations, 0-based. Stores a sorted coordinate
/// list plus a dense boolean view for O(1) membership checks.
class SampleMask {
 public:
  SampleMask(Index n1, Index n2, std::vector<std::pair<Index, Index>> entries)
      : n1_(n1), n2_(n2), entries_(std::move(entries)), flags_(static_cast<size_t>(n1 * n2), 0) {
    if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("SampleMask: dimensions must be positive");
    std::sort(entries_.begin(), entries_.end());
    for (const auto& [i, j] : entries_) {
      if (i < 0 || i >= n1_ || j < 0 || j >= n2_)
        throw std::invalid_argument("SampleMask: index out of range");
      uint8_t& f = flags_[static_cast<size_t>(i * n2_ + j)];
      if (f) throw std::invalid_argument("SampleMask: duplicate entry");
      f = 1;
    }
  }

  static SampleMask full(Index n1, Index n2) {
    std::vector<std::pair<Index, Index>> all;
    all.reserve(static_cast<size_t>(n1 * n2));
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < n2; ++j) all.emplace_back(i, j);
    return SampleMask(n1, n2, std::move(all));
  }

  Index rows() const { return n1_; }
  Index cols() const { return n2_; }
  Index size() const { return static_cast<Index>(entries_.size()); }
  bool contains(Index i, Index j) const { return flags_[static_cast<size_t>(i * n2_ + j)] != 0; }
  const std::vector<std::pair<Index, Index>>& entries() const { return entries_; }

 private:
  Index n1_, n2_;
  std::vector<std::pair<Index, Index>> entries_;
  std::vector<uint8_t> flags_;
};

/// Factor pair (D, A) with D of size n1 x r and A of size r x n2.
struct FactorPair {
  Matrix D;
  Matrix A;

  FactorPair() = default;
  FactorPair(Matrix D_, Matrix A_) : D(std::move(D_)), A(std::move(A_)) {
    if (D.cols() != A.rows()) throw std::invalid_argument("FactorPair: inner dimensions differ");
  }

  Index rank() const { return D.cols(); }
  Matrix product() const { return D * A; }
};

/// Per-element mean squared error ||X - Xref||_F^2 / (n1 n2).
inline double frobenius_mse(const Matrix& X, const Matrix& Xref) {
  if (X.rows() != Xref.rows() || X.cols() != Xref.cols())
    throw std::invalid_argument("frobenius_mse: shape mismatch");
  return (X - Xref).squaredNorm() / static_cast<double>(X.rows() * X.cols());
}

/// Entry-wise clamp of M onto [box.lo, box.hi].
inline Matrix project_box(const Matrix& M, const Box& box) {
  return M.cwiseMax(box.lo).cwiseMin(box.hi);
}

inline void project_box_inplace(Matrix& M, const Box& box) {
  M = M.cwiseMax(box.lo).cwiseMin(box.hi);
}

}  // namespace sfmc
