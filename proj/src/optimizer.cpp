#include "mms/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>

#include "mms/bvp.hpp"
#include "mms/spectrum.hpp"

namespace mms {

PhiFunctional PhiFunctional::single(int k) {
  if (k < 1) throw std::invalid_argument("eigenvalue index must be at least 1");
  PhiFunctional p;
  p.kind = Kind::SingleK;
  p.index = k;
  return p;
}

PhiFunctional PhiFunctional::weighted_sum(std::vector<double> w) {
  PhiFunctional p;
  p.kind = Kind::WeightedSum;
  p.weights = std::move(w);
  if (p.weights.empty()) throw std::invalid_argument("weighted sum needs at least one weight");
  return p;
}

PhiFunctional PhiFunctional::max_of(std::vector<int> idx) {
  PhiFunctional p;
  p.kind = Kind::MaxOf;
  p.indices = std::move(idx);
  if (p.indices.empty()) throw std::invalid_argument("max functional needs at least one index");
  for (int i : p.indices)
    if (i < 1) throw std::invalid_argument("eigenvalue indices must be at least 1");
  return p;
}

int PhiFunctional::k_max() const {
  switch (kind) {
    case Kind::SingleK: return index;
    case Kind::WeightedSum: return static_cast<int>(weights.size());
    case Kind::MaxOf: return *std::max_element(indices.begin(), indices.end());
  }
  return 1;
}

double phi_eval(const PhiFunctional& phi, const std::vector<double>& spectrum) {
  if (static_cast<int>(spectrum.size()) < phi.k_max())
    throw std::invalid_argument("spectrum shorter than the functional consumes");
  switch (phi.kind) {
    case PhiFunctional::Kind::SingleK: return spectrum[phi.index - 1];
    case PhiFunctional::Kind::WeightedSum: {
      double s = 0.0;
      for (std::size_t j = 0; j < phi.weights.size(); ++j)
        if (phi.weights[j] != 0.0) s += phi.weights[j] * spectrum[j];
      return s;
    }
    case PhiFunctional::Kind::MaxOf: {
      double s = -kInf;
      for (int j : phi.indices) s = std::max(s, spectrum[j - 1]);
      return s;
    }
  }
  throw std::logic_error("unknown functional kind");
}

PhiAuditReport phi_audit(const PhiFunctional& phi, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("audit needs at least one sample");
  PhiAuditReport rep;
  rep.samples = samples;
  rep.seed = seed;
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int k = phi.k_max();

  auto ascending = [&](double base) {
    std::vector<double> z(k);
    double acc = base;
    for (int j = 0; j < k; ++j) {
      acc += unif(rng);
      z[j] = acc;
    }
    return z;
  };

  for (int t = 0; t < samples; ++t) {
    // monotone pair z1 <= z2, strict in every coordinate on odd rounds
    std::vector<double> z1 = ascending(unif(rng));
    std::vector<double> z2 = z1;
    for (int j = 0; j < k; ++j) z2[j] += (t % 2 == 1) ? 0.1 + unif(rng) : unif(rng);
    if (t % 7 == 3)
      for (int j = k - 1; j >= k - 1 - (t % k) && j >= 0; --j) z1[j] = z2[j] = kInf;
    const double v1 = phi_eval(phi, z1), v2 = phi_eval(phi, z2);
    const double gap = (v1 == v2) ? 0.0 : v1 - v2;  // handles inf == inf
    if (gap > rep.worst_monotonicity_violation) {
      rep.worst_monotonicity_violation = gap;
      rep.counterexample = "monotonicity pair from sample " + std::to_string(t);
    }

    // componentwise convergent sequence and its tail minimum; the finite tail
    // may still sit below the limit by its own perturbation size, so allow a
    // Lipschitz multiple of the largest tail deviation
    std::vector<double> z = ascending(unif(rng));
    double tail_min = kInf, tail_delta = 0.0;
    const int len = 12, tail_from = 6;
    for (int s = 1; s <= len; ++s) {
      std::vector<double> zn(k);
      double delta = 0.0;
      for (int j = 0; j < k; ++j) {
        const double wiggle = (unif(rng) - 0.5) / (s * s);
        zn[j] = std::max(0.0, z[j] + wiggle);
        delta = std::max(delta, std::abs(zn[j] - z[j]));
      }
      if (s >= tail_from) {
        tail_min = std::min(tail_min, phi_eval(phi, zn));
        tail_delta = std::max(tail_delta, delta);
      }
    }
    const double v = phi_eval(phi, z);
    double lip = 1.0;
    if (phi.kind == PhiFunctional::Kind::WeightedSum) {
      lip = 0.0;
      for (double w : phi.weights) lip += std::abs(w);
    }
    const double allowed = tail_min + lip * tail_delta + 1e-9;
    const double lsc_gap = (v == tail_min) ? 0.0 : v - allowed;
    rep.worst_lsc_violation = std::max(rep.worst_lsc_violation, lsc_gap);
  }
  return rep;
}

Objective Objective::energy() { return Objective{Type::Energy, {}}; }

Objective Objective::spectral(PhiFunctional phi) {
  return Objective{Type::Phi, std::move(phi)};
}

double evaluate_objective(const DiscreteSpace& space, const Domain& dom, const Objective& obj) {
  if (obj.type == Objective::Type::Energy) return dirichlet_energy(space, dom);
  return phi_eval(obj.phi, eigenvalues(space, dom, obj.phi.k_max()).eigenvalues);
}

namespace {

// (value, mask) order used for all tie-breaking: smaller value first, then
// the numerically smaller bit mask (point 0 is the least significant bit).
bool mask_less(const std::vector<bool>& a, const std::vector<bool>& b) {
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
    if (a[i] != b[i]) return b[i];
  return false;
}

bool better(double va, const std::vector<bool>& ma, double vb, const std::vector<bool>& mb) {
  if (va != vb) return va < vb;
  return mask_less(ma, mb);
}

struct CachedObjective {
  const DiscreteSpace& space;
  const Objective& obj;
  std::map<std::vector<bool>, double> cache;
  long evaluations = 0;

  double operator()(const Domain& dom) {
    auto it = cache.find(dom.mask());
    if (it != cache.end()) return it->second;
    const double v = evaluate_objective(space, dom, obj);
    ++evaluations;
    cache.emplace(dom.mask(), v);
    return v;
  }
};

double feasibility_slack(double c) { return 1e-12 * std::max(1.0, std::abs(c)); }

}  // namespace

OptResult exhaustive_optimize(const DiscreteSpace& space, const Objective& obj, double c) {
  std::vector<int> adm;
  for (int i = 0; i < space.size(); ++i)
    if (space.is_admissible(i)) adm.push_back(i);
  const int p = static_cast<int>(adm.size());
  if (p > 24) throw resource_error("exhaustive enumeration is limited to 24 admissible points");

  CachedObjective eval{space, obj, {}, 0};
  OptResult res;
  res.method = "exhaustive";
  res.best_domain = Domain::empty(space);
  res.best_value = eval(res.best_domain);

  const double slack = feasibility_slack(c);
  for (std::uint64_t mask = 1; mask < (1ULL << p); ++mask) {
    double measure = 0.0;
    std::vector<bool> bits(space.size(), false);
    for (int b = 0; b < p; ++b)
      if (mask & (1ULL << b)) {
        bits[adm[b]] = true;
        measure += space.measure_of(adm[b]);
      }
    if (measure > c + slack) continue;
    Domain dom(space, std::move(bits));
    const double v = eval(dom);
    if (v < res.best_value) {
      res.best_value = v;
      res.best_domain = dom;
    }
  }
  res.evaluations = eval.evaluations;

  // Finite-space energy-set form of the minimiser: reducing to the positive
  // torsion set must not change it.
  if (res.best_domain.count() > 0) {
    const Domain reduced = energy_set_reduce(space, res.best_domain).domain;
    if (!(reduced == res.best_domain))
      throw std::runtime_error("exhaustive minimiser is not an energy set");
  }
  return res;
}

namespace {

struct RestartOutcome {
  Domain best;
  double value = kInf;
  long evaluations = 0;
  std::vector<TraceEntry> trace;
};

RestartOutcome run_restart(const DiscreteSpace& space, const Objective& obj, double c,
                           std::uint64_t seed, int restart_id, int max_moves) {
  auto rng = make_rng(split_seed(seed, static_cast<std::uint64_t>(restart_id)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> adm;
  for (int i = 0; i < space.size(); ++i)
    if (space.is_admissible(i)) adm.push_back(i);
  std::shuffle(adm.begin(), adm.end(), rng);

  const double slack = feasibility_slack(c);
  std::vector<bool> mask(space.size(), false);
  double measure = 0.0;
  for (int q : adm) {
    if (unif(rng) < 0.25) continue;  // leave room for add moves
    if (measure + space.measure_of(q) <= c + slack) {
      mask[q] = true;
      measure += space.measure_of(q);
    }
  }

  CachedObjective eval{space, obj, {}, 0};
  Domain current(space, mask);
  double value = eval(current);
  RestartOutcome out;
  out.trace.push_back({"restart " + std::to_string(restart_id) + " start", value});

  const bool allow_swaps = static_cast<int>(adm.size()) <= 64;
  for (int move = 0; move < max_moves; ++move) {
    Domain best_nb = current;
    double best_val = value;
    bool found = false;
    std::string best_desc;

    auto consider = [&](Domain cand, const std::string& desc) {
      const double v = eval(cand);
      if (better(v, cand.mask(), best_val, best_nb.mask()) && v <= value) {
        // strict improvement in value, or equal value with smaller mask
        if (v < value || mask_less(cand.mask(), current.mask())) {
          best_val = v;
          best_nb = std::move(cand);
          best_desc = desc;
          found = true;
        }
      }
    };

    for (int q : adm) {
      std::vector<bool> bits = current.mask();
      if (!current.contains(q)) {
        if (current.measure() + space.measure_of(q) > c + slack) continue;
        bits[q] = true;
        consider(Domain(space, std::move(bits)), "add " + std::to_string(q));
      } else {
        bits[q] = false;
        consider(Domain(space, std::move(bits)), "remove " + std::to_string(q));
      }
    }
    if (allow_swaps) {
      for (int qin : adm) {
        if (current.contains(qin)) continue;
        for (int qout : adm) {
          if (!current.contains(qout) || qin == qout) continue;
          if (current.measure() - space.measure_of(qout) + space.measure_of(qin) > c + slack)
            continue;
          std::vector<bool> bits = current.mask();
          bits[qout] = false;
          bits[qin] = true;
          consider(Domain(space, std::move(bits)),
                   "swap " + std::to_string(qout) + "->" + std::to_string(qin));
        }
      }
    }

    if (!found) break;
    current = best_nb;
    value = best_val;
    out.trace.push_back({best_desc, value});
  }

  out.best = current;
  out.value = value;
  out.evaluations = eval.evaluations;
  return out;
}

}  // namespace

OptResult local_search_optimize(const DiscreteSpace& space, const Objective& obj, double c,
                                std::uint64_t seed, int restarts, int max_moves) {
  if (restarts < 1) throw std::invalid_argument("at least one restart is required");
  std::vector<std::future<RestartOutcome>> jobs;
  jobs.reserve(restarts);
  for (int r = 0; r < restarts; ++r)
    jobs.push_back(std::async(std::launch::async, run_restart, std::cref(space), std::cref(obj),
                              c, seed, r, max_moves));

  OptResult res;
  res.method = "local_search";
  res.best_domain = Domain::empty(space);
  bool first = true;
  for (auto& job : jobs) {
    RestartOutcome out = job.get();
    res.evaluations += out.evaluations;
    for (auto& e : out.trace) res.trace.push_back(std::move(e));
    if (first || better(out.value, out.best.mask(), res.best_value, res.best_domain.mask())) {
      res.best_value = out.value;
      res.best_domain = std::move(out.best);
      first = false;
    }
  }
  return res;
}

OptResult threshold_iterate(const DiscreteSpace& space, double c, int iters) {
  if (iters < 1) throw std::invalid_argument("at least one iteration is required");
  if (!space.has_coords())
    throw std::invalid_argument("threshold iteration needs point coordinates");

  OptResult res;
  res.method = "threshold";

  // measure-c superlevel set of |u| (sorted cumulative measure, ties by index)
  auto superlevel = [&](const Vec& u) {
    std::vector<int> order;
    for (int i = 0; i < space.size(); ++i)
      if (space.is_admissible(i)) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double va = std::abs(u[a]), vb = std::abs(u[b]);
      if (va != vb) return va > vb;
      return a < b;
    });
    std::vector<bool> mask(space.size(), false);
    double measure = 0.0;
    const double slack = feasibility_slack(c);
    for (int q : order) {
      if (measure + space.measure_of(q) > c + slack) break;
      mask[q] = true;
      measure += space.measure_of(q);
    }
    return Domain(space, std::move(mask));
  };

  auto lambda1 = [&](const Domain& d) -> std::pair<double, Vec> {
    ++res.evaluations;
    if (d.count() == 0) return {kInf, Vec::Zero(space.size())};
    SpectrumResult sr = eigenvalues(space, d, 1);
    return {sr.eigenvalues[0], sr.eigenfunctions[0]};
  };

  auto [lam_full, u_full] = lambda1(Domain::full(space));
  Domain current = superlevel(u_full);
  auto [lam, u] = lambda1(current);
  res.trace.push_back({"threshold 0", lam});

  for (int it = 1; it < iters; ++it) {
    Domain next = superlevel(u);
    if (next == current) break;
    auto [lam_next, u_next] = lambda1(next);
    if (lam_next > lam + 1e-8 * std::max(1.0, std::abs(lam))) break;  // non-increase guard
    current = next;
    lam = lam_next;
    u = u_next;
    res.trace.push_back({"threshold " + std::to_string(it), lam});
  }

  res.best_domain = current;
  res.best_value = lam;
  return res;
}

}  // namespace mms
