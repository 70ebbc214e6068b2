#include "mms/linsolve.hpp"

namespace mms {

RestrictedSystem restrict_to(const DiscreteSpace& space, const Domain& dom) {
  RestrictedSystem sys;
  sys.index = dom.points();
  std::vector<int> pos(space.size(), -1);
  for (std::size_t s = 0; s < sys.index.size(); ++s) pos[sys.index[s]] = static_cast<int>(s);

  const int k = sys.size();
  sys.m.resize(k);
  for (int s = 0; s < k; ++s) sys.m[s] = space.measure_of(sys.index[s]);

  std::vector<Eigen::Triplet<double>> trip;
  const SpMat& K = space.form_matrix();
  for (int col = 0; col < K.outerSize(); ++col) {
    const int cj = pos[col];
    if (cj < 0) continue;
    for (SpMat::InnerIterator it(K, col); it; ++it) {
      const int ri = pos[it.row()];
      if (ri >= 0) trip.emplace_back(ri, cj, it.value());
    }
  }
  sys.K.resize(k, k);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.makeCompressed();
  return sys;
}

Vec scatter(const DiscreteSpace& space, const std::vector<int>& index, const Vec& sub) {
  Vec full = Vec::Zero(space.size());
  for (std::size_t s = 0; s < index.size(); ++s) full[index[s]] = sub[s];
  return full;
}

SpdSolver::SpdSolver(SpMat A, int direct_limit, double cg_tol) : a_(std::move(A)) {
  direct_ = a_.rows() <= direct_limit;
  if (direct_) {
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
    ldlt_->compute(a_);
    if (ldlt_->info() != Eigen::Success)
      throw std::runtime_error("sparse factorisation failed (matrix not SPD?)");
  } else {
    cg_ = std::make_unique<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>>();
    cg_->setTolerance(cg_tol);
    cg_->setMaxIterations(20 * a_.rows());
    cg_->compute(a_);
  }
}

Vec SpdSolver::solve(const Vec& b) const {
  if (direct_) return ldlt_->solve(b);
  Vec x = cg_->solve(b);
  if (cg_->info() != Eigen::Success)
    throw std::runtime_error("conjugate gradient did not reach the requested tolerance");
  return x;
}

double SpdSolver::residual(const Vec& x, const Vec& b) const {
  const double nb = b.norm();
  if (nb == 0.0) return (a_ * x).norm();
  return (a_ * x - b).norm() / nb;
}

}  // namespace mms
