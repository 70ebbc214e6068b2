#pragma once

#include <random>

#include "mms/builders.hpp"
#include "mms/space.hpp"

namespace mms::testing {

/// Three-point path with unit edge weights and unit masses; the closed-form
/// micro-instance used across the suites. Point numbering is 1,2,3 in the
/// labels, 0,1,2 in indices.
inline DiscreteSpace make_p3() {
  GradientOperator grad;
  grad.add_edge(0, 1, 1.0);
  grad.add_edge(1, 2, 1.0);
  Mat coords(3, 1);
  coords << 0.0, 1.0, 2.0;
  return DiscreteSpace(Vec::Ones(3), std::move(grad), coords, {"1", "2", "3"});
}

/// Connected random weighted graph: spanning tree plus extra edges, masses in
/// [0.5, 2], weights in [0.2, 2].
inline DiscreteSpace make_random_graph(int n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec measure(n);
  for (int i = 0; i < n; ++i) measure[i] = 0.5 + 1.5 * unif(rng);
  GradientOperator grad;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    grad.add_edge(pick(rng), i, 0.2 + 1.8 * unif(rng));
  }
  const int extra = n / 2;
  for (int e = 0; e < extra; ++e) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int a = pick(rng), b = pick(rng);
    if (a != b) grad.add_edge(std::min(a, b), std::max(a, b), 0.2 + 1.8 * unif(rng));
  }
  return DiscreteSpace(std::move(measure), std::move(grad));
}

/// Seeded random subdomain of the admissible points (possibly empty).
inline Domain random_domain(const DiscreteSpace& space, std::uint64_t seed, double p = 0.5) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<bool> mask(space.size(), false);
  for (int i = 0; i < space.size(); ++i)
    mask[i] = space.is_admissible(i) && unif(rng) < p;
  return Domain(space, std::move(mask));
}

/// Seeded random function supported on a domain.
inline Vec random_h0(const DiscreteSpace& space, const Domain& dom, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec u = Vec::Zero(space.size());
  for (int p : dom.points()) u[p] = unif(rng);
  return u;
}

/// The five builder specs used by the cross-builder suites, sized near 10^3
/// points each.
inline std::vector<BuilderSpec> audit_scale_specs() {
  std::vector<BuilderSpec> specs;
  {
    BuilderSpec s;
    s.kind = BuilderKind::Euclidean;
    s.extent = {1.0, 1.0};
    s.h = 1.0 / 32.0;  // 33^2 = 1089 points
    specs.push_back(s);
  }
  {
    BuilderSpec s;
    s.kind = BuilderKind::Torus;
    s.extent = {1.0, 1.0};
    s.h = 1.0 / 32.0;  // 1024 points
    specs.push_back(s);
  }
  {
    BuilderSpec s;
    s.kind = BuilderKind::Finsler;
    s.extent = {1.0, 1.0};
    s.h = 1.0 / 32.0;
    Mat a(2, 2);
    a << 4.0, 0.0, 0.0, 1.0;
    s.finsler_a = a;
    specs.push_back(s);
  }
  {
    BuilderSpec s;
    s.kind = BuilderKind::Gaussian;
    s.gaussian_q = {1.0, 2.0};
    s.gaussian_radius = 4.0;
    s.h = 0.4;  // (2*ceil(4*sqrt(2)/0.4)+1)^2 = 29^2 = 841 points
    specs.push_back(s);
  }
  {
    BuilderSpec s;
    s.kind = BuilderKind::Heisenberg;
    s.extent = {1.0, 1.0, 1.0};
    s.h = 0.25;  // 5*5*33 = 825 points
    specs.push_back(s);
  }
  return specs;
}

/// Independent capacity oracle: projected-gradient descent on
/// min u'(K+M)u over {u >= 1 on the domain, u >= 0 elsewhere}.
inline double qp_capacity_oracle(const DiscreteSpace& space, const Domain& dom,
                                 int max_iters = 200000, double tol = 1e-12) {
  const int n = space.size();
  SpMat A = space.form_matrix();
  for (int i = 0; i < n; ++i) A.coeffRef(i, i) += space.measure_of(i);
  A.makeCompressed();

  Vec lower = Vec::Zero(n);
  for (int p : dom.points()) lower[p] = 1.0;

  // power iteration for the step size (random start: the constant vector can
  // be an eigenvector of the smallest eigenvalue)
  auto rng = make_rng(0xabcdULL + static_cast<std::uint64_t>(n));
  std::normal_distribution<double> gauss;
  Vec z(n);
  for (int i = 0; i < n; ++i) z[i] = gauss(rng);
  z.normalize();
  double lmax = 1.0;
  for (int it = 0; it < 120; ++it) {
    z = (A * z).eval();
    lmax = z.norm();
    z /= lmax;
  }
  const double step = 1.0 / (1.05 * lmax);

  Vec u = lower;
  double prev = kInf;
  for (int it = 0; it < max_iters; ++it) {
    const Vec grad = 2.0 * (A * u);
    u = (u - step * grad).cwiseMax(lower);
    if (it % 128 == 0) {
      const double val = u.dot(A * u);
      if (std::abs(prev - val) <= tol * std::max(1.0, std::abs(val))) return val;
      prev = val;
    }
  }
  return u.dot(A * u);
}

}  // namespace mms::testing
