#include "mms/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mms {

void GradientOperator::add_row(GradientRow row) {
  if (row.idx.size() != row.coef.size())
    throw std::invalid_argument("gradient row: index/coefficient length mismatch");
  if (row.idx.size() < 2)
    throw std::invalid_argument("gradient row: needs at least two coefficients");
  if (row.weight < 0.0) throw std::invalid_argument("gradient row: negative weight");
  double s = 0.0, scale = 0.0;
  for (double c : row.coef) {
    s += c;
    scale += std::abs(c);
  }
  if (std::abs(s) > 1e-12 * std::max(1.0, scale))
    throw std::invalid_argument("gradient row: coefficients must sum to zero");
  rows_.push_back(std::move(row));
}

void GradientOperator::add_edge(int a, int b, double w) {
  if (a == b) throw std::invalid_argument("edge endpoints must differ");
  add_row(GradientRow{{a, b}, {-1.0, 1.0}, w / 2.0, a});
  add_row(GradientRow{{a, b}, {-1.0, 1.0}, w / 2.0, b});
}

int GridInfo::linear(const std::vector<int>& id) const {
  int lin = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) lin = lin * shape[a] + id[a];
  return lin;
}

std::vector<int> GridInfo::unpack(int linear_index) const {
  std::vector<int> id(shape.size());
  for (int a = static_cast<int>(shape.size()) - 1; a >= 0; --a) {
    id[a] = linear_index % shape[a];
    linear_index /= shape[a];
  }
  return id;
}

int GridInfo::point_count() const {
  return std::accumulate(shape.begin(), shape.end(), 1, std::multiplies<int>());
}

DiscreteSpace::DiscreteSpace(Vec measure, GradientOperator grad, std::optional<Mat> coords,
                             std::vector<std::string> labels, std::vector<bool> admissible)
    : measure_(std::move(measure)),
      grad_(std::move(grad)),
      coords_(std::move(coords)),
      labels_(std::move(labels)),
      admissible_(std::move(admissible)) {
  const int n = static_cast<int>(measure_.size());
  if (n == 0) throw std::invalid_argument("space needs at least one point");
  if ((measure_.array() <= 0.0).any())
    throw std::invalid_argument("every point must carry positive mass");
  if (coords_ && coords_->rows() != n)
    throw std::invalid_argument("coordinate row count must match point count");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != n)
    throw std::invalid_argument("label count must match point count");
  if (admissible_.empty()) admissible_.assign(n, true);
  if (static_cast<int>(admissible_.size()) != n)
    throw std::invalid_argument("admissible mask length must match point count");
  admissible_count_ = static_cast<int>(std::count(admissible_.begin(), admissible_.end(), true));
  total_measure_ = measure_.sum();

  rows_by_loc_.assign(n, {});
  std::vector<Eigen::Triplet<double>> trip;
  const auto& rows = grad_.rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const GradientRow& row = rows[r];
    if (row.location < 0 || row.location >= n)
      throw std::invalid_argument("gradient row location out of range");
    for (int i : row.idx)
      if (i < 0 || i >= n) throw std::invalid_argument("gradient row index out of range");
    rows_by_loc_[row.location].push_back(static_cast<int>(r));
    for (std::size_t s = 0; s < row.idx.size(); ++s)
      for (std::size_t t = 0; t < row.idx.size(); ++t)
        trip.emplace_back(row.idx[s], row.idx[t], row.weight * row.coef[s] * row.coef[t]);
  }
  form_.resize(n, n);
  form_.setFromTriplets(trip.begin(), trip.end());
  form_.makeCompressed();
}

const Mat& DiscreteSpace::coords() const {
  if (!coords_) throw std::invalid_argument("space carries no coordinates");
  return *coords_;
}

const std::vector<int>& DiscreteSpace::rows_at(int point) const { return rows_by_loc_[point]; }

Domain::Domain(const DiscreteSpace& space, std::vector<bool> mask) : mask_(std::move(mask)) {
  if (static_cast<int>(mask_.size()) != space.size())
    throw std::invalid_argument("domain mask length must match point count");
  for (int i = 0; i < space.size(); ++i) {
    if (!mask_[i]) continue;
    if (!space.is_admissible(i))
      throw std::invalid_argument("domain contains an absorbed boundary point");
    ++count_;
    measure_ += space.measure_of(i);
  }
}

Domain Domain::empty(const DiscreteSpace& space) {
  return Domain(space, std::vector<bool>(space.size(), false));
}

Domain Domain::full(const DiscreteSpace& space) { return Domain(space, space.admissible()); }

Domain Domain::of_points(const DiscreteSpace& space, const std::vector<int>& pts) {
  std::vector<bool> mask(space.size(), false);
  for (int p : pts) {
    if (p < 0 || p >= space.size()) throw std::invalid_argument("domain point out of range");
    mask[p] = true;
  }
  return Domain(space, std::move(mask));
}

std::vector<int> Domain::points() const {
  std::vector<int> pts;
  pts.reserve(count_);
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) pts.push_back(static_cast<int>(i));
  return pts;
}

Domain domain_union(const DiscreteSpace& space, const Domain& a, const Domain& b) {
  std::vector<bool> mask(space.size());
  for (int i = 0; i < space.size(); ++i) mask[i] = a.contains(i) || b.contains(i);
  return Domain(space, std::move(mask));
}

Domain domain_intersect(const DiscreteSpace& space, const Domain& a, const Domain& b) {
  std::vector<bool> mask(space.size());
  for (int i = 0; i < space.size(); ++i) mask[i] = a.contains(i) && b.contains(i);
  return Domain(space, std::move(mask));
}

namespace {

void check_length(const DiscreteSpace& space, const Vec& u) {
  if (u.size() != space.size())
    throw std::invalid_argument("function length does not match point count");
}

}  // namespace

Vec apply_gradient(const DiscreteSpace& space, const Vec& u) {
  check_length(space, u);
  Vec acc = Vec::Zero(space.size());
  for (const GradientRow& row : space.grad().rows()) {
    const double g = row.dot(u);
    acc[row.location] += row.weight * g * g;
  }
  return (acc.array() / space.measure().array()).sqrt();
}

double sobolev_norm(const DiscreteSpace& space, const Vec& u) {
  check_length(space, u);
  return std::sqrt(u.array().square().matrix().dot(space.measure()) + dirichlet_form(space, u));
}

double dirichlet_form(const DiscreteSpace& space, const Vec& u, const Vec& v) {
  check_length(space, u);
  check_length(space, v);
  double s = 0.0;
  for (const GradientRow& row : space.grad().rows()) s += row.weight * row.dot(u) * row.dot(v);
  return s;
}

double dirichlet_form(const DiscreteSpace& space, const Vec& u) {
  return dirichlet_form(space, u, u);
}

double l2m_inner(const DiscreteSpace& space, const Vec& u, const Vec& v) {
  return (u.array() * v.array()).matrix().dot(space.measure());
}

double l2m_norm(const DiscreteSpace& space, const Vec& u) {
  return std::sqrt(l2m_inner(space, u, u));
}

bool is_in_h0(const DiscreteSpace& space, const Domain& dom, const Vec& u, double tol) {
  check_length(space, u);
  if (tol < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
  for (int i = 0; i < space.size(); ++i)
    if (!dom.contains(i) && std::abs(u[i]) > tol) return false;
  return true;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsExactly: return "holds-exactly";
    case Verdict::HoldsAsInequality: return "holds-as-inequality";
    case Verdict::Violated: return "violated";
  }
  return "?";
}

const AxiomCheck& AxiomReport::get(const std::string& axiom) const {
  for (const auto& c : checks)
    if (c.axiom == axiom) return c;
  throw std::invalid_argument("no such axiom in report: " + axiom);
}

bool AxiomReport::has_violation() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const AxiomCheck& c) { return c.verdict == Verdict::Violated; });
}

namespace {

// Tracks one audited statement: the residual of the identity form
// |lhs - rhs_eq| and the one-sided excess max(0, lhs - rhs_bound) of the
// inequality form, both relative to 1 + |rhs|.
struct AuditAccum {
  double eq_residual = 0.0;
  double excess = 0.0;
  Counterexample worst_eq;
  Counterexample worst_ex;

  void observe(double lhs, double rhs_eq, double rhs_bound, const Vec& u, const Vec& v,
               int point, std::uint64_t seed, const char* note) {
    const double eq = std::abs(lhs - rhs_eq) / (1.0 + std::abs(rhs_eq));
    const double ex = std::max(0.0, lhs - rhs_bound) / (1.0 + std::abs(rhs_bound));
    if (eq > eq_residual) {
      eq_residual = eq;
      worst_eq = Counterexample{u, v, point, seed, note};
    }
    if (ex > excess) {
      excess = ex;
      worst_ex = Counterexample{u, v, point, seed, note};
    }
  }
};

// Identity with an inequality fallback: exact if the identity residual stays
// below eq_tol, otherwise an inequality verdict if the upper bound holds.
AxiomCheck finish_identity(const std::string& axiom, const AuditAccum& acc, double eq_tol,
                           double ineq_tol) {
  AxiomCheck check;
  check.axiom = axiom;
  check.eq_residual = acc.eq_residual;
  check.ineq_excess = acc.excess;
  if (acc.eq_residual <= eq_tol) {
    check.verdict = Verdict::HoldsExactly;
    check.worst_residual = acc.eq_residual;
  } else if (acc.excess <= ineq_tol) {
    check.verdict = Verdict::HoldsAsInequality;
    check.worst_residual = acc.eq_residual;
    check.counterexample = acc.worst_eq;
  } else {
    check.verdict = Verdict::Violated;
    check.worst_residual = acc.excess;
    check.counterexample = acc.worst_ex;
  }
  return check;
}

// Pure inequality: exact when the excess stays below tol, violated otherwise.
AxiomCheck finish_inequality(const std::string& axiom, const AuditAccum& acc, double tol) {
  AxiomCheck check;
  check.axiom = axiom;
  check.eq_residual = acc.eq_residual;
  check.ineq_excess = acc.excess;
  check.worst_residual = acc.excess;
  if (acc.excess <= tol) {
    check.verdict = Verdict::HoldsExactly;
  } else {
    check.verdict = Verdict::Violated;
    check.counterexample = acc.worst_ex;
  }
  return check;
}

}  // namespace

AxiomReport audit_axioms(const DiscreteSpace& space, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("audit needs at least one trial");
  const int n = space.size();
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> alpha_dist(-3.0, 3.0);

  AuditAccum d1, d2, d3, d4_max, d4_min, markov_abs, markov_max, markov_min;

  auto run_pair = [&](const Vec& u, const Vec& v, double alpha, std::uint64_t pair_seed) {
    const Vec du = apply_gradient(space, u);
    const Vec dv = apply_gradient(space, v);
    const Vec dsum = apply_gradient(space, u + v);
    const Vec dal = apply_gradient(space, alpha * u);
    const Vec dmax = apply_gradient(space, u.cwiseMax(v));
    const Vec dmin = apply_gradient(space, u.cwiseMin(v));
    const Vec dabs = apply_gradient(space, u.cwiseAbs());

    // Row-wise max combination: the provable discrete upper envelope for the
    // lattice operations, sqrt((1/m_x) sum_r c_r max((g_r.u)^2, (g_r.v)^2)).
    Vec comb_acc = Vec::Zero(n);
    for (const GradientRow& row : space.grad().rows()) {
      const double gu = row.dot(u), gv = row.dot(v);
      comb_acc[row.location] += row.weight * std::max(gu * gu, gv * gv);
    }
    const Vec comb = (comb_acc.array() / space.measure().array()).sqrt();

    for (int x = 0; x < n; ++x) {
      d1.observe(-du[x], 0.0, 0.0, u, v, x, pair_seed, "D1: Du >= 0");
      d2.observe(dsum[x], du[x] + dv[x], du[x] + dv[x], u, v, x, pair_seed,
                 "D2: D(u+v) <= Du + Dv");
      d3.observe(dal[x], std::abs(alpha) * du[x], std::abs(alpha) * du[x], u, v, x, pair_seed,
                 "D3: D(alpha*u) = |alpha|*Du");
      const double sel_max = u[x] > v[x] ? du[x] : dv[x];
      const double sel_min = u[x] > v[x] ? dv[x] : du[x];
      d4_max.observe(dmax[x], sel_max, comb[x], u, v, x, pair_seed, "D4 selection for u v v");
      d4_min.observe(dmin[x], sel_min, comb[x], u, v, x, pair_seed, "D4 selection for u ^ v");
      markov_abs.observe(dabs[x], du[x], du[x], u, v, x, pair_seed, "D(|u|) = Du");
      markov_max.observe(dmax[x], comb[x], comb[x], u, v, x, pair_seed,
                         "D(u v v) <= max-combination");
      markov_min.observe(dmin[x], comb[x], comb[x], u, v, x, pair_seed,
                         "D(u ^ v) <= max-combination");
    }
  };

  // Canonical basis pairs first: they witness the stencil counterexamples to
  // the selection identities deterministically (e.g. e_1, e_3 on a path).
  int canon = 0;
  for (int i = 0; i < n && canon < 6; ++i)
    for (int j = i + 1; j < n && canon < 6; ++j, ++canon) {
      Vec u = Vec::Zero(n), v = Vec::Zero(n);
      u[i] = 1.0;
      v[j] = 1.0;
      run_pair(u, v, 2.0, seed);
    }

  for (int t = 0; t < trials; ++t) {
    const std::uint64_t pair_seed = split_seed(seed, static_cast<std::uint64_t>(t));
    Vec u(n), v(n);
    for (int i = 0; i < n; ++i) {
      u[i] = unif(rng);
      v[i] = unif(rng);
    }
    double alpha = alpha_dist(rng);
    if (std::abs(alpha) < 1e-3) alpha = 0.5;
    run_pair(u, v, alpha, pair_seed);
  }

  AxiomReport report;
  report.trials = trials;
  report.seed = seed;
  // H1/H2: pointwise lattice operations and truncation keep functions in the
  // (full, finite-dimensional) space; nothing to measure.
  report.checks.push_back(AxiomCheck{"H1", Verdict::HoldsExactly, 0.0, 0.0, 0.0, std::nullopt});
  report.checks.push_back(AxiomCheck{"H2", Verdict::HoldsExactly, 0.0, 0.0, 0.0, std::nullopt});
  report.checks.push_back(finish_inequality("D1", d1, 1e-12));
  report.checks.push_back(finish_inequality("D2", d2, 1e-10));
  report.checks.push_back(finish_identity("D3", d3, 1e-12, 1e-12));
  report.checks.push_back(finish_identity("D4-max", d4_max, 1e-10, 1e-10));
  report.checks.push_back(finish_identity("D4-min", d4_min, 1e-10, 1e-10));
  report.checks.push_back(finish_identity("markov-abs", markov_abs, 1e-10, 1e-10));
  report.checks.push_back(finish_inequality("markov-max", markov_max, 1e-10));
  report.checks.push_back(finish_inequality("markov-min", markov_min, 1e-10));
  return report;
}

}  // namespace mms
