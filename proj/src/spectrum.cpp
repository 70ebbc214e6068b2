#include "mms/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "mms/bvp.hpp"
#include "mms/linsolve.hpp"

namespace mms {

namespace {

constexpr int kDenseLimit = 2000;

struct Pair {
  double lambda;
  Vec y;  // eigenvector in the symmetrised variable y = M^{1/2} u
};

std::vector<Pair> dense_smallest(const RestrictedSystem& sys, int k) {
  const int nd = sys.size();
  const Vec s = sys.m.array().sqrt();
  Mat C = Mat(sys.K);
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < nd; ++j) C(i, j) /= s[i] * s[j];
  Eigen::SelfAdjointEigenSolver<Mat> es(C);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  std::vector<Pair> out;
  for (int j = 0; j < k; ++j) out.push_back({es.eigenvalues()[j], es.eigenvectors().col(j)});
  return out;
}

// Shift-inverted Lanczos with full reorthogonalisation and deflation against
// already converged eigenvectors; works on y = M^{1/2} u so that the operator
// (C + sigma I)^{-1} = M^{1/2} (K + sigma M)^{-1} M^{1/2} is symmetric.
std::vector<Pair> lanczos_smallest(const RestrictedSystem& sys, int k) {
  const int nd = sys.size();
  const Vec s = sys.m.array().sqrt();
  const double sigma = std::max(1e-12, 1e-3 * sys.K.diagonal().sum() / sys.m.sum());

  SpMat A = sys.K;
  for (int i = 0; i < nd; ++i) A.coeffRef(i, i) += sigma * sys.m[i];
  A.makeCompressed();
  SpdSolver solver(A);
  auto op = [&](const Vec& y) -> Vec {
    return (solver.solve((y.array() * s.array()).matrix()).array() * s.array()).matrix();
  };

  std::vector<Pair> converged;
  auto rng = make_rng(0x5eedULL + static_cast<std::uint64_t>(nd));
  std::normal_distribution<double> gauss;

  const int max_rounds = 12;
  for (int round = 0; round < max_rounds && static_cast<int>(converged.size()) < k; ++round) {
    const int want = k - static_cast<int>(converged.size());
    const int steps = std::min(nd, std::max(2 * want + 40, 60) * (1 + round / 3));

    std::vector<Vec> basis;
    Vec v(nd);
    for (int i = 0; i < nd; ++i) v[i] = gauss(rng);
    auto deflate = [&](Vec& x) {
      for (const Pair& p : converged) x -= p.y.dot(x) * p.y;
      for (const Vec& b : basis) x -= b.dot(x) * b;
    };
    deflate(v);
    if (v.norm() < 1e-14) continue;
    v.normalize();

    std::vector<double> alpha, beta;
    basis.push_back(v);
    Vec prev = Vec::Zero(nd);
    double beta_prev = 0.0;
    for (int j = 0; j < steps; ++j) {
      Vec w = op(basis.back());
      const double a = basis.back().dot(w);
      alpha.push_back(a);
      w -= a * basis.back();
      if (j > 0) w -= beta_prev * prev;
      // two-pass full reorthogonalisation
      for (int pass = 0; pass < 2; ++pass) deflate(w);
      const double b = w.norm();
      if (b < 1e-13) break;
      beta.push_back(b);
      beta_prev = b;
      prev = basis.back();
      basis.push_back(w / b);
    }

    const int m = static_cast<int>(alpha.size());
    if (m == 0) continue;
    Mat T = Mat::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(T);

    // Largest theta of the inverted operator correspond to smallest lambda.
    for (int t = m - 1; t >= 0 && static_cast<int>(converged.size()) < k; --t) {
      const double theta = es.eigenvalues()[t];
      if (theta <= 0.0) break;
      Vec y = Vec::Zero(nd);
      for (int j = 0; j < m; ++j) y += es.eigenvectors()(j, t) * basis[j];
      for (const Pair& p : converged) y -= p.y.dot(y) * p.y;
      const double ny = y.norm();
      if (ny < 1e-10) continue;
      y /= ny;
      const double lambda = 1.0 / theta - sigma;
      // accept only pairs whose symmetrised residual is at solver accuracy
      const Vec cy = (sys.K * (y.array() / s.array()).matrix()).array() / s.array();
      const double res = (cy - lambda * y).norm();
      if (res <= 1e-9 * (1.0 + std::abs(lambda))) converged.push_back({lambda, y});
    }
  }

  if (static_cast<int>(converged.size()) < k)
    throw std::runtime_error("lanczos eigensolver did not converge");
  std::sort(converged.begin(), converged.end(),
            [](const Pair& a, const Pair& b) { return a.lambda < b.lambda; });
  converged.resize(k);
  return converged;
}

}  // namespace

SpectrumResult eigenvalues(const DiscreteSpace& space, const Domain& dom, int k) {
  if (k < 1) throw std::invalid_argument("eigenvalue count must be at least 1");
  SpectrumResult res;
  const int nd = dom.count();
  const int kk = std::min(k, nd);

  if (kk > 0) {
    RestrictedSystem sys = restrict_to(space, dom);
    std::vector<Pair> pairs =
        nd <= kDenseLimit ? dense_smallest(sys, kk) : lanczos_smallest(sys, kk);
    const Vec s = sys.m.array().sqrt();
    for (const Pair& p : pairs) {
      const Vec u = (p.y.array() / s.array()).matrix();
      res.eigenvalues.push_back(p.lambda);
      res.eigenfunctions.push_back(scatter(space, sys.index, u));
      res.residuals.push_back((sys.K * u - p.lambda * (sys.m.array() * u.array()).matrix()).norm());
    }
  }
  for (int j = kk; j < k; ++j) res.eigenvalues.push_back(kInf);
  return res;
}

double dirichlet_energy(const DiscreteSpace& space, const Domain& dom) {
  if (dom.count() == 0) return 0.0;
  return torsion(space, dom).objective;
}

}  // namespace mms
