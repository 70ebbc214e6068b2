#pragma once

#include <vector>

#include "mms/space.hpp"

namespace mms {

/// Smallest Dirichlet eigenvalues of a domain. Missing entries (when the
/// domain has fewer points than requested) are +infinity; eigenfunctions are
/// full-length vectors vanishing outside the domain and orthonormal in L2(m).
struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<Vec> eigenfunctions;
  std::vector<double> residuals;  // ||K u - lambda M u||_2 on the domain rows

  double value(int j) const { return eigenvalues.at(j); }
};

/// Solves the generalized symmetric problem K u = lambda M u restricted to
/// the domain and returns the k smallest pairs. Dense for small domains,
/// shift-inverted Lanczos with deflation above the dense threshold.
SpectrumResult eigenvalues(const DiscreteSpace& space, const Domain& dom, int k);

/// Minimum of the torsion functional: E of the empty set is 0 and the
/// first-order identity E = -1/2 * integral of the torsion holds.
double dirichlet_energy(const DiscreteSpace& space, const Domain& dom);

}  // namespace mms
