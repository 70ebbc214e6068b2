#pragma once

#include <string>
#include <vector>

#include "mms/builders.hpp"
#include "mms/space.hpp"

namespace mms {

/// Nested refinements of one builder geometry with h halved per level.
/// Supports the uniform-mass grid kinds (euclidean box and torus), whose
/// child-cell domain prolongation preserves measure exactly.
class GridHierarchy {
 public:
  GridHierarchy(BuilderSpec base, int levels, int point_budget = 4'000'000);

  int level_count() const { return static_cast<int>(levels_.size()); }
  int finest() const { return level_count() - 1; }
  const DiscreteSpace& level(int l) const { return levels_.at(l); }
  const BuilderSpec& base() const { return base_; }

 private:
  BuilderSpec base_;
  std::vector<DiscreteSpace> levels_;
};

GridHierarchy build_hierarchy(const BuilderSpec& spec, int levels,
                              int point_budget = 4'000'000);

/// Child-cell injection of a domain one level down the hierarchy; exact on
/// measure for admissible domains.
Domain prolong_domain(const GridHierarchy& h, int level, const Domain& dom);

/// Multilinear interpolation of point values one level down.
Vec prolong_function(const GridHierarchy& h, int level, const Vec& u);

/// Interpolation followed by restriction to the prolonged domain, so that
/// prolonged zero-boundary functions stay zero-boundary exactly.
Vec prolong_function_in(const GridHierarchy& h, int level, const Vec& u, const Domain& dom);

Domain domain_on_finest(const GridHierarchy& h, int level, const Domain& dom);

/// Torsion of (dom, level) carried to the finest grid.
Vec torsion_on_finest(const GridHierarchy& h, int level, const Domain& dom);

/// Sequence of prolongations of one coarsest-level domain.
std::vector<Domain> constant_sequence(const GridHierarchy& h, const Domain& coarse);

/// L2(m) distance, on the finest level, between the torsion functions of two
/// (domain, level) pairs.
double gamma_distance(const GridHierarchy& h, const Domain& dom_a, int level_a,
                      const Domain& dom_b, int level_b);

struct ConvergenceReport {
  double tau_pos = 1e-12;

  std::vector<double> torsion_norms;        // ||W_l||_L2(m) on the finest grid
  std::vector<double> pairwise_distances;   // consecutive-level distances

  bool null_limit = false;  // Cauchy tail consistent with a vanishing limit
  Vec limit_function;       // finest-level proxy (zero when null)
  Domain limit_domain;      // superlevel set of the proxy (empty when null)

  double domination_margin = 0.0;    // max(w - w_{limit domain}), expected <= 0
  double domination_gap_over = 0.0;  // max(w_{limit or measure-limit domain} - w)

  double limit_measure = 0.0;
  double tail_min_measure = 0.0;  // min over the two finest levels
  double measure_margin = 0.0;    // tail_min - limit_measure, expected >= 0

  bool spectral_divergence = false;          // empty limit: check growth instead
  std::vector<double> lambda_limit;          // on the limit domain
  std::vector<double> lambda_tail_min;       // min over the two finest levels
  std::vector<double> spectral_margin;       // tail_min - limit (or level growth)
  std::vector<double> spectral_slack;        // 10x measured level-to-level shift

  double energy_limit = 0.0;
  double energy_tail_min = 0.0;
  double energy_margin = 0.0;
  double energy_slack = 0.0;

  bool limit_in_h0 = false;  // proxy vanishes outside the limit domain
  std::string summary;
};

/// Finite rendering of weak-gamma limit diagnostics for one domain per level:
/// Cauchy decay of prolonged torsions, torsion domination by the limit
/// domain, and lower-semicontinuity margins for measure, eigenvalues and
/// energy. All statements are finite-scale evidence, not asymptotic claims.
ConvergenceReport weak_gamma_analyze(const GridHierarchy& h, const std::vector<Domain>& seq,
                                     int k, double tau_pos = 1e-12);

/// Union enlargement towards a coarsest-level target: each domain is joined
/// with the prolonged superlevel set {torsion(target) > eps}.
std::vector<Domain> enlarge_sequence(const GridHierarchy& h, const std::vector<Domain>& seq,
                                     const Domain& target, double eps);

struct HoleSpec {
  double spacing = 0.25;
  double radius = 0.0;
};

struct PerforatedResult {
  std::vector<Domain> seq;
  ConvergenceReport report;
  double distance_to_full = 0.0;  // gamma-distance to the full domain
  double full_torsion_max = 0.0;
};

/// Removes a lattice of rasterised holes per level and runs the weak-gamma
/// analysis, reporting the persistent distance to the unperforated domain.
PerforatedResult perforated_study(const GridHierarchy& h, const std::vector<HoleSpec>& holes,
                                  int k);

/// Axis-aligned stripes of the given period and width (index-space exact).
Domain make_stripes(const DiscreteSpace& space, int axis, double period, double width);

/// Full admissible set minus the rasterised hole lattice.
Domain remove_holes(const DiscreteSpace& space, const HoleSpec& holes);

}  // namespace mms
