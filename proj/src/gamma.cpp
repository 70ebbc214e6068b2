#include "mms/gamma.hpp"

#include <cmath>

#include "mms/bvp.hpp"
#include "mms/spectrum.hpp"

namespace mms {

namespace {

const GridInfo& grid_of(const DiscreteSpace& s) {
  if (!s.grid()) throw std::invalid_argument("hierarchy operations need structured grids");
  return *s.grid();
}

void check_level(const GridHierarchy& h, int level, bool allow_finest = false) {
  const int top = allow_finest ? h.level_count() : h.level_count() - 1;
  if (level < 0 || level >= top) throw std::invalid_argument("invalid hierarchy level");
}

}  // namespace

GridHierarchy::GridHierarchy(BuilderSpec base, int levels, int point_budget)
    : base_(std::move(base)) {
  if (levels < 2) throw std::invalid_argument("a hierarchy needs at least two levels");
  if (base_.kind != BuilderKind::Euclidean && base_.kind != BuilderKind::Torus)
    throw std::invalid_argument(
        "hierarchies support the uniform-mass grid kinds (euclidean, torus)");
  BuilderSpec spec = base_;
  for (int l = 0; l < levels; ++l) {
    spec.max_points = point_budget;
    DiscreteSpace space = build_space(spec);
    if (l > 0) {
      const GridInfo& coarse = grid_of(levels_.back());
      const GridInfo& fine = grid_of(space);
      for (std::size_t a = 0; a < coarse.shape.size(); ++a) {
        const int expect = fine.periodic ? 2 * coarse.shape[a] : 2 * coarse.shape[a] - 1;
        if (fine.shape[a] != expect)
          throw std::runtime_error("refined grid does not nest into the coarse one");
      }
    }
    levels_.push_back(std::move(space));
    spec = refine(spec);
  }
}

GridHierarchy build_hierarchy(const BuilderSpec& spec, int levels, int point_budget) {
  return GridHierarchy(spec, levels, point_budget);
}

Domain prolong_domain(const GridHierarchy& h, int level, const Domain& dom) {
  check_level(h, level);
  const DiscreteSpace& coarse = h.level(level);
  const DiscreteSpace& fine = h.level(level + 1);
  const GridInfo& gc = grid_of(coarse);
  const GridInfo& gf = grid_of(fine);
  const int d = static_cast<int>(gc.shape.size());

  std::vector<bool> mask(fine.size(), false);
  std::vector<int> child(d);
  for (int p : dom.points()) {
    const std::vector<int> id = gc.unpack(p);
    // children are the fine points {2i-1, 2i} per axis (wrapped on the torus)
    const int combos = 1 << d;
    for (int c = 0; c < combos; ++c) {
      bool ok = true;
      for (int a = 0; a < d; ++a) {
        int f = 2 * id[a] - ((c >> a) & 1);
        if (gf.periodic) {
          f = (f + gf.shape[a]) % gf.shape[a];
        } else if (f < 0) {
          ok = false;
          break;
        }
        child[a] = f;
      }
      if (ok) mask[gf.linear(child)] = true;
    }
  }
  return Domain(fine, std::move(mask));
}

Vec prolong_function(const GridHierarchy& h, int level, const Vec& u) {
  check_level(h, level);
  const DiscreteSpace& coarse = h.level(level);
  const DiscreteSpace& fine = h.level(level + 1);
  if (u.size() != coarse.size())
    throw std::invalid_argument("function length does not match the coarse level");
  const GridInfo& gc = grid_of(coarse);
  const GridInfo& gf = grid_of(fine);
  const int d = static_cast<int>(gc.shape.size());

  // refine one axis at a time: linear interpolation along the axis
  std::vector<double> vals(u.data(), u.data() + u.size());
  std::vector<int> shape = gc.shape;
  for (int a = 0; a < d; ++a) {
    std::vector<int> out_shape = shape;
    out_shape[a] = gf.shape[a];
    int outer = 1, inner = 1;
    for (int b = 0; b < a; ++b) outer *= shape[b];
    for (int b = a + 1; b < d; ++b) inner *= shape[b];
    std::vector<double> next(static_cast<std::size_t>(outer) * out_shape[a] * inner);
    for (int o = 0; o < outer; ++o)
      for (int f = 0; f < out_shape[a]; ++f)
        for (int i = 0; i < inner; ++i) {
          double v;
          if (f % 2 == 0) {
            v = vals[(static_cast<std::size_t>(o) * shape[a] + f / 2) * inner + i];
          } else {
            const int left = f / 2;
            const int right = gf.periodic ? (left + 1) % shape[a] : left + 1;
            v = 0.5 * (vals[(static_cast<std::size_t>(o) * shape[a] + left) * inner + i] +
                       vals[(static_cast<std::size_t>(o) * shape[a] + right) * inner + i]);
          }
          next[(static_cast<std::size_t>(o) * out_shape[a] + f) * inner + i] = v;
        }
    vals = std::move(next);
    shape = out_shape;
  }
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Vec prolong_function_in(const GridHierarchy& h, int level, const Vec& u, const Domain& dom) {
  Vec fine = prolong_function(h, level, u);
  const Domain fine_dom = prolong_domain(h, level, dom);
  for (int i = 0; i < fine.size(); ++i)
    if (!fine_dom.contains(i)) fine[i] = 0.0;
  return fine;
}

Domain domain_on_finest(const GridHierarchy& h, int level, const Domain& dom) {
  check_level(h, level, true);
  Domain d = dom;
  for (int l = level; l < h.finest(); ++l) d = prolong_domain(h, l, d);
  return d;
}

Vec torsion_on_finest(const GridHierarchy& h, int level, const Domain& dom) {
  check_level(h, level, true);
  Vec w = torsion(h.level(level), dom).w;
  Domain d = dom;
  for (int l = level; l < h.finest(); ++l) {
    w = prolong_function_in(h, l, w, d);
    d = prolong_domain(h, l, d);
  }
  return w;
}

std::vector<Domain> constant_sequence(const GridHierarchy& h, const Domain& coarse) {
  std::vector<Domain> seq = {coarse};
  for (int l = 0; l < h.finest(); ++l) seq.push_back(prolong_domain(h, l, seq.back()));
  return seq;
}

double gamma_distance(const GridHierarchy& h, const Domain& dom_a, int level_a,
                      const Domain& dom_b, int level_b) {
  check_level(h, level_a, true);
  check_level(h, level_b, true);
  const Vec wa = torsion_on_finest(h, level_a, dom_a);
  const Vec wb = torsion_on_finest(h, level_b, dom_b);
  return l2m_norm(h.level(h.finest()), wa - wb);
}

ConvergenceReport weak_gamma_analyze(const GridHierarchy& h, const std::vector<Domain>& seq,
                                     int k, double tau_pos) {
  if (static_cast<int>(seq.size()) != h.level_count())
    throw std::invalid_argument("the sequence needs one domain per level");
  if (k < 1) throw std::invalid_argument("at least one eigenvalue is required");
  const int top = h.finest();
  const DiscreteSpace& fine = h.level(top);

  ConvergenceReport rep;
  rep.tau_pos = tau_pos;

  std::vector<Vec> carried;
  for (int l = 0; l <= top; ++l) carried.push_back(torsion_on_finest(h, l, seq[l]));
  for (int l = 0; l <= top; ++l) rep.torsion_norms.push_back(l2m_norm(fine, carried[l]));
  for (int l = 0; l < top; ++l)
    rep.pairwise_distances.push_back(l2m_norm(fine, carried[l + 1] - carried[l]));

  // Null-limit rule: if the remaining Cauchy motion dominates the current
  // norm, the tail is consistent with a vanishing limit.
  const double last_move = rep.pairwise_distances.back();
  const double floor = 1e-14 * std::sqrt(fine.total_measure());
  rep.null_limit = rep.torsion_norms.back() <= std::max(last_move, floor);

  if (rep.null_limit) {
    rep.limit_function = Vec::Zero(fine.size());
    rep.limit_domain = Domain::empty(fine);
  } else {
    rep.limit_function = torsion(fine, seq[top]).w;
    const double cut = tau_pos * rep.limit_function.maxCoeff();
    std::vector<bool> mask(fine.size(), false);
    for (int i = 0; i < fine.size(); ++i)
      mask[i] = seq[top].contains(i) && rep.limit_function[i] > cut;
    rep.limit_domain = Domain(fine, std::move(mask));
  }

  // torsion domination by the limit domain
  const Vec w_dom = torsion(fine, rep.limit_domain).w;
  rep.domination_margin = (rep.limit_function - w_dom).maxCoeff();

  // gap in the other direction, against the measure-limit proxy: the points
  // kept by both of the two finest levels
  const Domain meas_proxy =
      domain_intersect(fine, domain_on_finest(h, top - 1, seq[top - 1]), seq[top]);
  const Domain over_dom = domain_union(fine, rep.limit_domain, meas_proxy);
  rep.domination_gap_over = (torsion(fine, over_dom).w - rep.limit_function).maxCoeff();

  // measure semicontinuity (liminf proxied by the two finest levels)
  rep.limit_measure = rep.limit_domain.measure();
  rep.tail_min_measure = std::min(seq[top].measure(), seq[top - 1].measure());
  rep.measure_margin = rep.tail_min_measure - rep.limit_measure;

  // spectral and energy semicontinuity
  const SpectrumResult sp_top = eigenvalues(fine, seq[top], k);
  const SpectrumResult sp_prev = eigenvalues(h.level(top - 1), seq[top - 1], k);
  rep.spectral_divergence = rep.limit_domain.count() == 0;
  const SpectrumResult sp_lim = rep.spectral_divergence
                                    ? SpectrumResult{}
                                    : eigenvalues(fine, rep.limit_domain, k);
  auto finite_diff = [](double a, double b) {  // inf - inf counts as no change
    return (std::isinf(a) && std::isinf(b)) ? 0.0 : a - b;
  };
  for (int j = 0; j < k; ++j) {
    const double lt = sp_top.eigenvalues[j];
    const double lp = sp_prev.eigenvalues[j];
    const double tail = std::min(lt, lp);
    rep.lambda_tail_min.push_back(tail);
    const double slack = 10.0 * std::abs(finite_diff(lt, lp)) +
                         1e-8 * (1.0 + std::min(std::abs(lt), std::abs(lp)));
    rep.spectral_slack.push_back(slack);
    if (rep.spectral_divergence) {
      rep.lambda_limit.push_back(kInf);
      // divergence consistency: the tail levels must climb
      rep.spectral_margin.push_back(finite_diff(lt, lp));
    } else {
      rep.lambda_limit.push_back(sp_lim.eigenvalues[j]);
      rep.spectral_margin.push_back(finite_diff(tail, sp_lim.eigenvalues[j]));
    }
  }

  rep.energy_limit = dirichlet_energy(fine, rep.limit_domain);
  const double e_top = dirichlet_energy(fine, seq[top]);
  const double e_prev = dirichlet_energy(h.level(top - 1), seq[top - 1]);
  rep.energy_tail_min = std::min(e_top, e_prev);
  rep.energy_margin = rep.energy_tail_min - rep.energy_limit;
  rep.energy_slack = 10.0 * std::abs(e_top - e_prev) + 1e-10;

  rep.limit_in_h0 =
      is_in_h0(fine, rep.limit_domain, rep.limit_function,
               tau_pos * std::max(1e-300, rep.limit_function.maxCoeff()));

  rep.summary = rep.null_limit
                    ? "tail consistent with a null weak-gamma limit"
                    : "tail consistent with weak-gamma convergence to the reported domain";
  return rep;
}

std::vector<Domain> enlarge_sequence(const GridHierarchy& h, const std::vector<Domain>& seq,
                                     const Domain& target, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("enlargement level must be positive");
  if (static_cast<int>(seq.size()) != h.level_count())
    throw std::invalid_argument("the sequence needs one domain per level");

  const Vec wt = torsion(h.level(0), target).w;
  std::vector<bool> mask(h.level(0).size(), false);
  for (int i = 0; i < h.level(0).size(); ++i) mask[i] = wt[i] > eps;
  Domain level_set(h.level(0), std::move(mask));

  std::vector<Domain> out;
  Domain carried = level_set;
  for (int l = 0; l < h.level_count(); ++l) {
    if (l > 0) carried = prolong_domain(h, l - 1, carried);
    out.push_back(domain_union(h.level(l), seq[l], carried));
  }
  return out;
}

Domain make_stripes(const DiscreteSpace& space, int axis, double period, double width) {
  const GridInfo& g = grid_of(space);
  if (axis < 0 || axis >= static_cast<int>(g.shape.size()))
    throw std::invalid_argument("stripe axis out of range");
  const double ha = g.spacing[axis];
  const int period_idx = static_cast<int>(std::llround(period / ha));
  const int width_idx = static_cast<int>(std::llround(width / ha));
  if (period_idx < 1 || std::abs(period_idx * ha - period) > 1e-9 ||
      std::abs(width_idx * ha - width) > 1e-9)
    throw std::invalid_argument("stripe period and width must be grid multiples");
  std::vector<bool> mask(space.size(), false);
  for (int i = 0; i < space.size(); ++i) {
    if (!space.is_admissible(i)) continue;
    const int ia = g.unpack(i)[axis];
    mask[i] = (ia % period_idx) < width_idx;
  }
  return Domain(space, std::move(mask));
}

Domain remove_holes(const DiscreteSpace& space, const HoleSpec& holes) {
  const GridInfo& g = grid_of(space);
  const int d = static_cast<int>(g.shape.size());
  for (int a = 0; a < d; ++a) {
    const double cells = holes.spacing / g.spacing[a];
    if (holes.spacing <= 0.0 || std::abs(cells - std::llround(cells)) > 1e-9 ||
        std::llround(cells) < 1)
      throw std::invalid_argument("hole spacing must be a positive grid multiple");
  }
  if (holes.radius < 0.0) throw std::invalid_argument("hole radius must be nonnegative");

  std::vector<bool> mask(space.size(), false);
  for (int i = 0; i < space.size(); ++i) {
    if (!space.is_admissible(i)) continue;
    const std::vector<int> id = g.unpack(i);
    bool inside_hole = false;
    // distance to the nearest hole-lattice centre, axis by axis
    double dist2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double x = g.origin[a] + id[a] * g.spacing[a];
      const double extent = g.shape[a] * g.spacing[a];
      double r = std::fmod(x, holes.spacing);
      if (r < 0) r += holes.spacing;
      double delta = std::min(r, holes.spacing - r);
      if (!g.periodic) {
        // centres only at lattice points inside the box
        delta = std::min(r, holes.spacing - r);
        if (x + (holes.spacing - r) > extent && r > holes.spacing - r) delta = r;
      }
      dist2 += delta * delta;
    }
    inside_hole = dist2 <= holes.radius * holes.radius + 1e-12;
    mask[i] = !inside_hole;
  }
  return Domain(space, std::move(mask));
}

PerforatedResult perforated_study(const GridHierarchy& h, const std::vector<HoleSpec>& holes,
                                  int k) {
  if (static_cast<int>(holes.size()) != h.level_count())
    throw std::invalid_argument("one hole spec per level is required");
  PerforatedResult res;
  for (int l = 0; l < h.level_count(); ++l)
    res.seq.push_back(remove_holes(h.level(l), holes[l]));
  res.report = weak_gamma_analyze(h, res.seq, k);

  const Domain full = Domain::full(h.level(h.finest()));
  const Vec w_full = torsion(h.level(h.finest()), full).w;
  res.full_torsion_max = w_full.maxCoeff();
  res.distance_to_full =
      l2m_norm(h.level(h.finest()),
               torsion(h.level(h.finest()), res.seq[h.finest()]).w - w_full);
  return res;
}

}  // namespace mms
