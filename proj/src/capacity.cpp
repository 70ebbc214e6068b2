#include "mms/capacity.hpp"

#include <cmath>

#include "mms/linsolve.hpp"

namespace mms {

CapacityResult capacity(const DiscreteSpace& space, const Domain& dom) {
  const int n = space.size();
  CapacityResult res;
  if (dom.count() == 0) {
    res.potential = Vec::Zero(n);
    res.active_set = Domain::empty(space);
    return res;
  }

  // Minimise a(u,u) + ||u||^2 with u = 1 on the domain: eliminate the pinned
  // block of (K + M) u = 0 on the free points. The free block includes the
  // absorbed layer (potentials live in the full space).
  std::vector<int> free_pts;
  for (int i = 0; i < n; ++i)
    if (!dom.contains(i)) free_pts.push_back(i);

  Vec u = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    if (dom.contains(i)) u[i] = 1.0;

  if (!free_pts.empty()) {
    std::vector<int> pos(n, -1);
    for (std::size_t s = 0; s < free_pts.size(); ++s) pos[free_pts[s]] = static_cast<int>(s);
    const int nf = static_cast<int>(free_pts.size());
    std::vector<Eigen::Triplet<double>> trip;
    Vec rhs = Vec::Zero(nf);
    const SpMat& K = space.form_matrix();
    for (int col = 0; col < K.outerSize(); ++col) {
      for (SpMat::InnerIterator it(K, col); it; ++it) {
        const int ri = pos[it.row()];
        if (ri < 0) continue;
        if (pos[col] >= 0)
          trip.emplace_back(ri, pos[col], it.value());
        else
          rhs[ri] -= it.value();  // column is pinned to 1
      }
    }
    for (int s = 0; s < nf; ++s) trip.emplace_back(s, s, space.measure_of(free_pts[s]));
    SpMat A(nf, nf);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    const Vec x = SpdSolver(std::move(A)).solve(rhs);
    for (int s = 0; s < nf; ++s) u[free_pts[s]] = x[s];
  }

  const double lo = u.minCoeff(), hi = u.maxCoeff();
  if (lo < -1e-10 || hi > 1.0 + 1e-10)
    throw std::runtime_error(
        "capacity potential left the [0,1] range: the form is not Markovian "
        "(positive off-diagonal coupling) or the solve broke down");

  res.potential = u;
  res.value = dirichlet_form(space, u) + l2m_inner(space, u, u);
  std::vector<bool> active(n, false);
  for (int i = 0; i < n; ++i) active[i] = space.is_admissible(i) && u[i] >= 1.0 - 1e-9;
  res.active_set = Domain(space, std::move(active));
  return res;
}

Domain quasi_support(const DiscreteSpace& space, const std::vector<Vec>& funcs,
                     double tau_pos) {
  if (funcs.empty()) throw std::invalid_argument("quasi-support needs at least one function");
  const int n = space.size();
  Vec w = Vec::Zero(n);
  double scale = 0.5;
  for (const Vec& u : funcs) {
    if (u.size() != n) throw std::invalid_argument("function length does not match point count");
    const double nh = sobolev_norm(space, u);
    if (nh == 0.0) throw std::invalid_argument("quasi-support input contains the zero function");
    w += scale / nh * u.cwiseAbs();
    scale *= 0.5;
  }
  const double cut = tau_pos * w.maxCoeff();
  for (int i = 0; i < n; ++i)
    if (!space.is_admissible(i) && w[i] > cut)
      throw std::invalid_argument("quasi-support input does not vanish on the absorbed layer");
  std::vector<bool> mask(n, false);
  for (int i = 0; i < n; ++i) mask[i] = space.is_admissible(i) && w[i] > cut;
  return Domain(space, std::move(mask));
}

H0EquivalenceReport check_h0_equivalence(const DiscreteSpace& space, const Domain& dom) {
  H0EquivalenceReport rep;
  rep.equivalent = true;
  for (int p : dom.points()) {
    const double cap = capacity(space, Domain::of_points(space, {p})).value;
    rep.atoms.push_back({p, cap, space.measure_of(p)});
    if (!(cap > 0.0)) rep.equivalent = false;
  }
  return rep;
}

}  // namespace mms
