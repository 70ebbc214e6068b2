#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mms/space.hpp"

namespace mms {

enum class BuilderKind { Euclidean, Torus, Finsler, Gaussian, Heisenberg };

std::string to_string(BuilderKind k);
BuilderKind builder_kind_from_string(const std::string& s);

/// Parameters for the example-space builders. All grids are vertex-centred
/// with spacing h; box builders carry one absorbed Dirichlet layer on the
/// outer boundary, excluded from every admissible domain.
struct BuilderSpec {
  BuilderKind kind = BuilderKind::Euclidean;
  std::vector<double> extent = {1.0};  // box lengths per axis
  double h = 0.125;

  // finsler: quadratic structure F(x,X) = sqrt(X^T A(x) X); either a constant
  // SPD matrix or a spatially varying field.
  std::optional<Mat> finsler_a;
  std::function<Mat(const Vec&)> finsler_field;

  // gaussian: covariance eigenvalues and truncation radius (in standard
  // deviations of the widest direction).
  std::vector<double> gaussian_q = {1.0};
  double gaussian_radius = 6.0;

  int max_points = 4'000'000;

  int dim() const;
};

DiscreteSpace build_euclidean_grid(const BuilderSpec& spec);
DiscreteSpace build_periodic_torus(const BuilderSpec& spec);
DiscreteSpace build_finsler_grid(const BuilderSpec& spec);
DiscreteSpace build_gaussian_grid(const BuilderSpec& spec);
DiscreteSpace build_heisenberg_grid(const BuilderSpec& spec);

/// Dispatch on spec.kind.
DiscreteSpace build_space(const BuilderSpec& spec);

/// spec with h halved (used by hierarchies).
BuilderSpec refine(const BuilderSpec& spec);

}  // namespace mms
