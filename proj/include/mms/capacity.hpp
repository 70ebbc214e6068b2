#pragma once

#include <vector>

#include "mms/space.hpp"

namespace mms {

/// Capacity of a domain: the minimum of ||u||_H^2 = a(u,u) + ||u||^2_L2(m)
/// over potentials pinned to 1 on the domain, together with the minimiser.
struct CapacityResult {
  double value = 0.0;
  Vec potential;
  Domain active_set;  // admissible points where the potential reaches 1
};

CapacityResult capacity(const DiscreteSpace& space, const Domain& dom);

/// Support construction from a countable family: the superlevel set of
/// w = sum_k 2^{-k} |u_k| / ||u_k||_H. Every input must vanish (within
/// tau_pos of its own scale) on the absorbed layer.
Domain quasi_support(const DiscreteSpace& space, const std::vector<Vec>& funcs,
                     double tau_pos = 1e-12);

/// Atom-by-atom comparison of capacity against mass: on atomic spaces every
/// singleton has capacity at least its (positive) mass, so the m-a.e. and
/// q.e. versions of the zero-boundary space coincide.
struct H0EquivalenceReport {
  struct AtomEntry {
    int point = 0;
    double cap = 0.0;
    double mass = 0.0;
  };
  std::vector<AtomEntry> atoms;
  bool equivalent = false;  // true iff cap({x}) > 0 for every atom
};

H0EquivalenceReport check_h0_equivalence(const DiscreteSpace& space, const Domain& dom);

}  // namespace mms
