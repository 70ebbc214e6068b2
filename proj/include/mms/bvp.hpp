#pragma once

#include "mms/space.hpp"

namespace mms {

/// Minimiser of the Dirichlet functional
///   F(u) = 1/2 a(u,u) + (a/2) ||u||^2_L2(m) - <f, u>_L2(m)
/// over functions vanishing outside the domain, together with the objective
/// value and the linear-system residual.
struct BvpSolution {
  Vec w;
  double objective = 0.0;
  double a = 1.0;
  Domain domain;
  double residual = 0.0;
};

BvpSolution solve_bvp(const DiscreteSpace& space, const Domain& dom, double a, const Vec& f);
BvpSolution solve_bvp(const DiscreteSpace& space, const Domain& dom, double a, double f);

/// Torsion function: the a = 1, f = 1 solve.
BvpSolution torsion(const DiscreteSpace& space, const Domain& dom);

/// Minimiser of 1/2 a(v,v) + (n/2) ||v - u||^2_L2(m) over the domain; obeys
/// ||u_n - u||^2_L2(m) <= a(u,u) / n.
Vec penalized_minimizer(const DiscreteSpace& space, const Domain& dom, const Vec& u, int n);

struct EnergySetResult {
  Domain domain;            // points of the input where the torsion is positive
  double removed_measure = 0.0;  // mass of the input not kept
};

/// Keeps the points of dom where the torsion exceeds tau_pos * max(torsion).
EnergySetResult energy_set_reduce(const DiscreteSpace& space, const Domain& dom,
                                  double tau_pos = 1e-12);

struct ComparisonReport {
  int trials = 0;
  std::uint64_t seed = 0;
  // Signed minima over all instances and points of (upper - lower); the
  // comparison principles predict each to be nonnegative.
  double worst_domain_margin = 0.0;      // w_Omega - w_omega for omega within Omega
  double worst_reaction_margin = 0.0;    // w_{a} - w_{A} for a < A
  double worst_rhs_margin = 0.0;         // w_{g} - w_{f} for f <= g

  double worst() const;
  bool ok(double tol) const { return worst() >= -tol; }
};

/// Randomised check of the pointwise comparison principles on seeded
/// instances (nested domains, ordered right-hand sides, ordered reaction
/// coefficients).
ComparisonReport check_comparison(const DiscreteSpace& space, int trials, std::uint64_t seed);

}  // namespace mms
