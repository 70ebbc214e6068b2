#include "mms/bvp.hpp"

#include <cmath>

#include "mms/linsolve.hpp"

namespace mms {

namespace {

double objective_value(const DiscreteSpace& space, double a, const Vec& f, const Vec& w) {
  return 0.5 * dirichlet_form(space, w) + 0.5 * a * l2m_inner(space, w, w) -
         l2m_inner(space, f, w);
}

}  // namespace

BvpSolution solve_bvp(const DiscreteSpace& space, const Domain& dom, double a, const Vec& f) {
  if (a <= 0.0) throw std::invalid_argument("reaction coefficient a must be positive");
  if (f.size() != space.size())
    throw std::invalid_argument("right-hand side length does not match point count");

  BvpSolution sol;
  sol.a = a;
  sol.domain = dom;
  if (dom.count() == 0) {
    sol.w = Vec::Zero(space.size());
    sol.objective = 0.0;
    sol.residual = 0.0;
    return sol;
  }

  RestrictedSystem sys = restrict_to(space, dom);
  SpMat A = sys.K;
  Vec rhs(sys.size());
  for (int s = 0; s < sys.size(); ++s) {
    A.coeffRef(s, s) += a * sys.m[s];
    rhs[s] = sys.m[s] * f[sys.index[s]];
  }
  A.makeCompressed();
  SpdSolver solver(A);
  const Vec x = solver.solve(rhs);
  sol.residual = solver.residual(x, rhs);
  sol.w = scatter(space, sys.index, x);
  sol.objective = objective_value(space, a, f, sol.w);

  if ((f.array() >= 0.0).all() && sol.w.minCoeff() < -1e-12 * std::max(1.0, sol.w.maxCoeff()))
    throw std::runtime_error(
        "nonnegative data produced a negative solution: the form is not "
        "Markovian (positive off-diagonal coupling) or the solve broke down");
  return sol;
}

BvpSolution solve_bvp(const DiscreteSpace& space, const Domain& dom, double a, double f) {
  return solve_bvp(space, dom, a, Vec::Constant(space.size(), f));
}

BvpSolution torsion(const DiscreteSpace& space, const Domain& dom) {
  return solve_bvp(space, dom, 1.0, 1.0);
}

Vec penalized_minimizer(const DiscreteSpace& space, const Domain& dom, const Vec& u, int n) {
  if (n < 1) throw std::invalid_argument("penalisation index must be at least 1");
  if (!is_in_h0(space, dom, u, 0.0))
    throw std::invalid_argument("penalisation input must vanish outside the domain");
  if (dom.count() == 0) return Vec::Zero(space.size());

  RestrictedSystem sys = restrict_to(space, dom);
  SpMat A = sys.K;
  Vec rhs(sys.size());
  for (int s = 0; s < sys.size(); ++s) {
    A.coeffRef(s, s) += static_cast<double>(n) * sys.m[s];
    rhs[s] = static_cast<double>(n) * sys.m[s] * u[sys.index[s]];
  }
  A.makeCompressed();
  return scatter(space, sys.index, SpdSolver(A).solve(rhs));
}

EnergySetResult energy_set_reduce(const DiscreteSpace& space, const Domain& dom,
                                  double tau_pos) {
  if (tau_pos < 0.0) throw std::invalid_argument("threshold must be nonnegative");
  EnergySetResult res;
  if (dom.count() == 0) {
    res.domain = Domain::empty(space);
    return res;
  }
  const Vec w = torsion(space, dom).w;
  const double cut = tau_pos * w.maxCoeff();
  std::vector<bool> mask(space.size(), false);
  for (int i = 0; i < space.size(); ++i) mask[i] = dom.contains(i) && w[i] > cut;
  res.domain = Domain(space, std::move(mask));
  res.removed_measure = dom.measure() - res.domain.measure();
  return res;
}

double ComparisonReport::worst() const {
  return std::min({worst_domain_margin, worst_reaction_margin, worst_rhs_margin});
}

ComparisonReport check_comparison(const DiscreteSpace& space, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("comparison check needs at least one trial");
  ComparisonReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.worst_domain_margin = rep.worst_reaction_margin = rep.worst_rhs_margin = kInf;

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int t = 0; t < trials; ++t) {
    std::vector<bool> big(space.size(), false), small(space.size(), false);
    for (int i = 0; i < space.size(); ++i) {
      if (!space.is_admissible(i)) continue;
      if (unif(rng) < 0.6) {
        big[i] = true;
        if (unif(rng) < 0.7) small[i] = true;
      }
    }
    Domain omega_big(space, big), omega_small(space, small);
    Vec f(space.size()), g(space.size());
    for (int i = 0; i < space.size(); ++i) {
      f[i] = 2.0 * unif(rng);
      g[i] = f[i] + unif(rng);
    }
    const double a = 0.3 + 1.2 * unif(rng);
    const double A = a + 0.1 + 1.9 * unif(rng);

    const Vec w_big = solve_bvp(space, omega_big, a, f).w;
    const Vec w_small = solve_bvp(space, omega_small, a, f).w;
    const Vec w_bigA = solve_bvp(space, omega_big, A, f).w;
    const Vec w_bigg = solve_bvp(space, omega_big, a, g).w;

    rep.worst_domain_margin = std::min(rep.worst_domain_margin, (w_big - w_small).minCoeff());
    rep.worst_reaction_margin = std::min(rep.worst_reaction_margin, (w_big - w_bigA).minCoeff());
    rep.worst_rhs_margin = std::min(rep.worst_rhs_margin, (w_bigg - w_big).minCoeff());
  }
  return rep;
}

}  // namespace mms
