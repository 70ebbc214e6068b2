#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mms/common.hpp"

namespace mms {

/// One sparse difference functional g_r: coefficients over point indices that
/// sum to zero, a nonnegative weight c_r, and the point where the row
/// contributes to the pointwise gradient.
struct GradientRow {
  std::vector<int> idx;
  std::vector<double> coef;
  double weight = 0.0;
  int location = 0;

  double dot(const Vec& u) const {
    double s = 0.0;
    for (std::size_t t = 0; t < idx.size(); ++t) s += coef[t] * u[idx[t]];
    return s;
  }
};

/// Collection of difference rows. The induced objects are
///   Du(x)  = sqrt( (1/m_x) sum_{r: loc(r)=x} c_r (g_r.u)^2 )
///   a(u,v) = sum_r c_r (g_r.u)(g_r.v)
/// so that the pointwise gradient and the quadratic form are consistent:
/// integral of Du^2 dm equals a(u,u) exactly.
class GradientOperator {
 public:
  void add_row(GradientRow row);
  /// Undirected edge (a,b) with weight w, encoded as two rows located at a
  /// and b, each with weight w/2.
  void add_edge(int a, int b, double w);

  const std::vector<GradientRow>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<GradientRow> rows_;
};

/// Structured-grid metadata attached by builders; required by hierarchies,
/// hole rasterisation and threshold rearrangement.
struct GridInfo {
  std::vector<int> shape;       // points per axis (axis 0 slowest)
  std::vector<double> spacing;  // grid step per axis
  std::vector<double> origin;   // coordinate of index 0 per axis
  bool periodic = false;

  int linear(const std::vector<int>& id) const;
  std::vector<int> unpack(int linear_index) const;
  int point_count() const;
};

/// Finite metric measure space: per-point masses, a gradient operator and
/// optional coordinates / labels. Points flagged as not admissible form the
/// absorbed Dirichlet layer and are excluded from every domain.
class DiscreteSpace {
 public:
  DiscreteSpace(Vec measure, GradientOperator grad,
                std::optional<Mat> coords = std::nullopt,
                std::vector<std::string> labels = {},
                std::vector<bool> admissible = {});

  int size() const { return static_cast<int>(measure_.size()); }
  const Vec& measure() const { return measure_; }
  double total_measure() const { return total_measure_; }
  double measure_of(int i) const { return measure_[i]; }

  const GradientOperator& grad() const { return grad_; }
  bool has_coords() const { return coords_.has_value(); }
  const Mat& coords() const;
  const std::vector<std::string>& labels() const { return labels_; }

  bool is_admissible(int i) const { return admissible_[i]; }
  const std::vector<bool>& admissible() const { return admissible_; }
  int admissible_count() const { return admissible_count_; }

  /// Sparse matrix of the bilinear form a(u,v) = u^T K v.
  const SpMat& form_matrix() const { return form_; }

  /// Row indices grouped by location (CSR layout over points).
  const std::vector<int>& rows_at(int point) const;

  const std::optional<GridInfo>& grid() const { return grid_; }
  void set_grid(GridInfo g) { grid_ = std::move(g); }
  const std::vector<std::string>& notes() const { return notes_; }
  void add_note(std::string s) { notes_.push_back(std::move(s)); }

 private:
  Vec measure_;
  GradientOperator grad_;
  std::optional<Mat> coords_;
  std::vector<std::string> labels_;
  std::vector<bool> admissible_;
  int admissible_count_ = 0;
  double total_measure_ = 0.0;
  SpMat form_;
  std::vector<std::vector<int>> rows_by_loc_;
  std::optional<GridInfo> grid_;
  std::vector<std::string> notes_;
};

/// Subset of the point set together with its cached measure.
class Domain {
 public:
  Domain() = default;
  Domain(const DiscreteSpace& space, std::vector<bool> mask);

  static Domain empty(const DiscreteSpace& space);
  /// All admissible points.
  static Domain full(const DiscreteSpace& space);
  static Domain of_points(const DiscreteSpace& space, const std::vector<int>& pts);

  const std::vector<bool>& mask() const { return mask_; }
  bool contains(int i) const { return mask_[i]; }
  int count() const { return count_; }
  double measure() const { return measure_; }
  std::vector<int> points() const;

  bool operator==(const Domain& other) const { return mask_ == other.mask_; }

 private:
  std::vector<bool> mask_;
  int count_ = 0;
  double measure_ = 0.0;
};

Domain domain_union(const DiscreteSpace& space, const Domain& a, const Domain& b);
Domain domain_intersect(const DiscreteSpace& space, const Domain& a, const Domain& b);

/// Pointwise gradient Du.
Vec apply_gradient(const DiscreteSpace& space, const Vec& u);

/// (||u||_L2(m)^2 + ||Du||_L2(m)^2)^(1/2).
double sobolev_norm(const DiscreteSpace& space, const Vec& u);

/// Bilinear form a(u,v); a(u,u) equals the squared L2(m) norm of Du.
double dirichlet_form(const DiscreteSpace& space, const Vec& u, const Vec& v);
double dirichlet_form(const DiscreteSpace& space, const Vec& u);

double l2m_norm(const DiscreteSpace& space, const Vec& u);
double l2m_inner(const DiscreteSpace& space, const Vec& u, const Vec& v);

/// True iff |u| <= tol everywhere outside dom.
bool is_in_h0(const DiscreteSpace& space, const Domain& dom, const Vec& u, double tol);

enum class Verdict { HoldsExactly, HoldsAsInequality, Violated };

std::string to_string(Verdict v);

struct Counterexample {
  Vec u;
  Vec v;
  int point = -1;
  std::uint64_t seed = 0;
  std::string note;
};

struct AxiomCheck {
  std::string axiom;
  Verdict verdict = Verdict::HoldsExactly;
  double worst_residual = 0.0;  // residual backing the verdict
  double eq_residual = 0.0;     // worst |lhs - rhs| of the identity form
  double ineq_excess = 0.0;     // worst max(0, lhs - bound) of the inequality form
  std::optional<Counterexample> counterexample;
};

struct AxiomReport {
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<AxiomCheck> checks;

  const AxiomCheck& get(const std::string& axiom) const;
  bool has_violation() const;
};

/// Randomised audit of the structural axioms of (H, D): nonnegativity,
/// subadditivity, absolute homogeneity, the lattice identities and their
/// inequality forms. Deterministic in (trials, seed); canonical basis pairs
/// are always included so stencil counterexamples are found reproducibly.
AxiomReport audit_axioms(const DiscreteSpace& space, int trials, std::uint64_t seed);

}  // namespace mms
