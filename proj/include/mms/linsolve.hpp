#pragma once

#include <memory>
#include <vector>

#include "mms/space.hpp"

namespace mms {

/// Form matrix, mass diagonal and index map of a space restricted to a domain.
struct RestrictedSystem {
  std::vector<int> index;  // domain points in increasing order
  SpMat K;                 // form matrix restricted to the domain
  Vec m;                   // masses restricted to the domain

  int size() const { return static_cast<int>(index.size()); }
};

RestrictedSystem restrict_to(const DiscreteSpace& space, const Domain& dom);

/// Scatter a restricted vector back to the full point set (zero elsewhere).
Vec scatter(const DiscreteSpace& space, const std::vector<int>& index, const Vec& sub);

/// SPD solver: sparse direct factorisation up to a size threshold, diagonally
/// preconditioned conjugate gradients above it.
class SpdSolver {
 public:
  explicit SpdSolver(SpMat A, int direct_limit = 50'000, double cg_tol = 1e-12);

  Vec solve(const Vec& b) const;
  /// Relative residual of the last returned solution candidate.
  double residual(const Vec& x, const Vec& b) const;
  int size() const { return static_cast<int>(a_.rows()); }

 private:
  SpMat a_;
  bool direct_ = true;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
  std::unique_ptr<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>> cg_;
};

}  // namespace mms
