#pragma once

#include <string>
#include <vector>

#include "mms/space.hpp"

namespace mms {

/// Closed library of monotone spectral functionals: a single eigenvalue, a
/// nonnegative weighted sum, or a maximum over a set of indices (1-based).
struct PhiFunctional {
  enum class Kind { SingleK, WeightedSum, MaxOf };
  Kind kind = Kind::SingleK;
  int index = 1;
  std::vector<double> weights;
  std::vector<int> indices;

  static PhiFunctional single(int k);
  static PhiFunctional weighted_sum(std::vector<double> w);
  static PhiFunctional max_of(std::vector<int> idx);

  /// Number of leading eigenvalues the functional consumes.
  int k_max() const;
};

/// Evaluates the functional on an ascending spectrum vector; +infinity
/// entries propagate through every consumed coordinate with positive weight.
double phi_eval(const PhiFunctional& phi, const std::vector<double>& spectrum);

struct PhiAuditReport {
  int samples = 0;
  std::uint64_t seed = 0;
  double worst_monotonicity_violation = 0.0;  // max Phi(z1) - Phi(z2), z1 <= z2
  double worst_lsc_violation = 0.0;           // max Phi(z) - min over tail
  bool monotone_ok(double tol = 1e-12) const { return worst_monotonicity_violation <= tol; }
  bool lsc_ok(double tol = 1e-9) const { return worst_lsc_violation <= tol; }
  std::string counterexample;
};

/// Sampled check of monotonicity and of lower semicontinuity along
/// componentwise convergent sequences.
PhiAuditReport phi_audit(const PhiFunctional& phi, int samples, std::uint64_t seed);

/// Objective of the constrained shape problem: a spectral functional or the
/// Dirichlet energy.
struct Objective {
  enum class Type { Phi, Energy };
  Type type = Type::Energy;
  PhiFunctional phi;

  static Objective energy();
  static Objective spectral(PhiFunctional phi);
};

double evaluate_objective(const DiscreteSpace& space, const Domain& dom, const Objective& obj);

struct TraceEntry {
  std::string move;
  double value = 0.0;
};

struct OptResult {
  Domain best_domain;
  double best_value = kInf;
  long evaluations = 0;  // eigen/torsion solves performed
  std::vector<TraceEntry> trace;
  std::string method;
};

/// Exact minimiser over all subsets of admissible points with measure at most
/// c. Ties are broken towards the numerically smallest bit mask (point 0 =
/// least significant bit). Refuses more than 24 admissible points.
OptResult exhaustive_optimize(const DiscreteSpace& space, const Objective& obj, double c);

/// Multistart add/remove/swap steepest descent under the measure constraint;
/// deterministic in the seed, never worse than its own starting points.
OptResult local_search_optimize(const DiscreteSpace& space, const Objective& obj, double c,
                                std::uint64_t seed, int restarts, int max_moves = 500);

/// Level-set rearrangement for the first eigenvalue: alternates the first
/// eigenfunction with its measure-c superlevel set, with a non-increase guard.
OptResult threshold_iterate(const DiscreteSpace& space, double c, int iters);

}  // namespace mms
