// Acceptance suite: one criterion per --criterion value, a PASS/FAIL line per
// criterion, exit code = number of failed criteria.
//
// Two clauses below (criterion 1's pair eigenvalue and criterion 7's path
// optimum) assert reference constants that equal eigenvalues of K + M, where
// K is the form matrix and M the mass matrix. They are mutually inconsistent
// with the other reference values in the same criteria: the pinned torsion
// system on the path forces K = [[1,-1,0],[-1,2,-1],[0,-1,1]], M = I, and the
// min-max of the form alone then gives (3-sqrt5)/2 on {1,2}, not
// (5-sqrt5)/2, and makes {1,2} beat {1,3} under a budget of two points. The
// solver implements the form-only min-max (which the continuum oracles of
// criterion 6 confirm), so those two clauses fail by the stated margin and
// are reported as such rather than being patched to match.

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "mms/bvp.hpp"
#include "mms/capacity.hpp"
#include "mms/experiment.hpp"
#include "mms/gamma.hpp"
#include "mms/optimizer.hpp"
#include "mms/spectrum.hpp"
#include "support.hpp"

using namespace mms;
using mms::testing::make_p3;
using mms::testing::make_random_graph;
using mms::testing::qp_capacity_oracle;
using mms::testing::random_domain;
using mms::testing::random_h0;

namespace {

const double kPi = 3.14159265358979323846;

struct Clause {
  std::string text;
  bool ok;
};

class CriterionRun {
 public:
  void check(bool ok, const std::string& text) { clauses_.push_back({text, ok}); }

  void check_close(double got, double want, double tol, const std::string& text) {
    std::ostringstream os;
    os << text << ": got " << std::setprecision(12) << got << ", want " << want << " (tol "
       << tol << ")";
    clauses_.push_back({os.str(), std::abs(got - want) <= tol});
  }

  bool passed() const {
    for (const Clause& c : clauses_)
      if (!c.ok) return false;
    return true;
  }

  void print(std::ostream& os) const {
    for (const Clause& c : clauses_)
      os << "    [" << (c.ok ? "ok" : "FAIL") << "] " << c.text << "\n";
  }

 private:
  std::vector<Clause> clauses_;
};

double relerr(double got, double want) { return std::abs(got / want - 1.0); }

// ---------------------------------------------------------------- criterion 1
void criterion_1(CriterionRun& run) {
  DiscreteSpace p3 = make_p3();

  const Vec w_mid = torsion(p3, Domain::of_points(p3, {1})).w;
  run.check(std::abs(w_mid[0]) <= 1e-10 && std::abs(w_mid[1] - 1.0 / 3.0) <= 1e-10 &&
                std::abs(w_mid[2]) <= 1e-10,
            "torsion({2}) = (0, 1/3, 0)");

  const Vec w_pair = torsion(p3, Domain::of_points(p3, {0, 1})).w;
  run.check(std::abs(w_pair[0] - 0.8) <= 1e-10 && std::abs(w_pair[1] - 0.6) <= 1e-10 &&
                std::abs(w_pair[2]) <= 1e-10,
            "torsion({1,2}) = (0.8, 0.6, 0)");

  run.check_close(dirichlet_energy(p3, Domain::of_points(p3, {0, 1})), -0.7, 1e-10,
                  "E({1,2})");

  // reference constant as stated; see the header note for why it is
  // unattainable together with the torsion values above
  const double lam = eigenvalues(p3, Domain::of_points(p3, {0, 1}), 1).eigenvalues[0];
  run.check_close(lam, (5.0 - std::sqrt(5.0)) / 2.0, 1e-10, "lambda_1({1,2})");

  run.check_close(capacity(p3, Domain::of_points(p3, {1})).value, 2.0, 1e-10, "cap({2})");
}

// ---------------------------------------------------------------- criterion 2
void criterion_2(CriterionRun& run) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const BuilderSpec& spec : mms::testing::audit_scale_specs()) {
    const DiscreteSpace space = build_space(spec);
    const AxiomReport rep = audit_axioms(space, 200, 1234);
    const std::string name = to_string(spec.kind);
    run.check(rep.get("D1").worst_residual <= 1e-12 && rep.get("D3").worst_residual <= 1e-12,
              name + ": D1/D3 exact to 1e-12");
    run.check(rep.get("D2").worst_residual <= 1e-10, name + ": D2 within 1e-10");
    run.check(rep.get("markov-abs").ineq_excess <= 1e-10 &&
                  rep.get("markov-max").worst_residual <= 1e-10 &&
                  rep.get("markov-min").worst_residual <= 1e-10,
              name + ": markov inequalities within 1e-10");
  }
  const AxiomReport p3rep = audit_axioms(make_p3(), 200, 1234);
  run.check(p3rep.get("D4-max").verdict == Verdict::HoldsAsInequality &&
                p3rep.get("D4-max").counterexample.has_value(),
            "D4 equality counterexample found on the path");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream os;
  os << "runtime " << std::fixed << std::setprecision(2) << secs << " s < 10 s";
  run.check(secs < 10.0, os.str());
}

// ---------------------------------------------------------------- criterion 3
void criterion_3(CriterionRun& run) {
  const auto specs = mms::testing::audit_scale_specs();
  double worst = kInf;
  int total = 0;
  for (std::size_t b = 0; b < specs.size(); ++b) {
    const DiscreteSpace space = build_space(specs[b]);
    const ComparisonReport rep = check_comparison(space, 100, 555 + b);
    total += rep.trials;
    worst = std::min(worst, rep.worst());
  }
  std::ostringstream os;
  os << total << " seeded comparison instances, worst margin " << std::scientific
     << std::setprecision(2) << worst;
  run.check(total == 500 && worst >= -1e-10, os.str());
}

// ---------------------------------------------------------------- criterion 4
void criterion_4(CriterionRun& run) {
  double worst_ratio = 0.0;
  int cases = 0;
  for (int t = 0; t < 50; ++t) {
    const DiscreteSpace g = make_random_graph(20, 4000 + t);
    const Domain dom = random_domain(g, 4100 + t, 0.6);
    if (dom.count() == 0) continue;
    const Vec u = random_h0(g, dom, 4200 + t);
    const double energy = dirichlet_form(g, u);
    if (energy <= 0.0) continue;
    ++cases;
    for (int n : {1, 10, 100, 1000}) {
      const Vec un = penalized_minimizer(g, dom, u, n);
      const double d2 = l2m_norm(g, un - u) * l2m_norm(g, un - u);
      worst_ratio = std::max(worst_ratio, d2 * n / energy);
    }
  }
  std::ostringstream os;
  os << cases << " seeded cases, worst n*dist^2 / energy = " << std::setprecision(10)
     << worst_ratio;
  run.check(cases >= 45 && worst_ratio <= 1.0 + 1e-9, os.str());
}

// ---------------------------------------------------------------- criterion 5
void criterion_5(CriterionRun& run) {
  for (const BuilderSpec& spec : mms::testing::audit_scale_specs()) {
    const DiscreteSpace space = build_space(spec);
    int violations = 0, reductions = 0;
    for (int rep = 0; rep < 4; ++rep) {
      const Domain dom = random_domain(space, 7000 + rep, 0.5);
      if (dom.count() == 0) continue;
      const Vec w = torsion(space, dom).w;
      const double cut = 1e-12 * w.maxCoeff();
      for (int t = 0; t < 25; ++t) {
        const Vec u = random_h0(space, dom, 7100 + 100 * rep + t);
        const double umax = u.cwiseAbs().maxCoeff();
        if (umax == 0.0) continue;
        for (int i = 0; i < space.size(); ++i)
          if (std::abs(u[i]) > 1e-8 * umax && !(w[i] > cut)) ++violations;
      }
      const EnergySetResult red = energy_set_reduce(space, dom);
      if (!(red.domain == dom)) ++reductions;
    }
    run.check(violations == 0 && reductions == 0,
              to_string(spec.kind) + ": 100 supports inside the positive torsion set, "
                                     "every tested domain is an energy set");
  }
}

// ---------------------------------------------------------------- criterion 6
void criterion_6(CriterionRun& run) {
  const auto t0 = std::chrono::steady_clock::now();
  {
    BuilderSpec s;
    s.kind = BuilderKind::Euclidean;
    s.extent = {1.0, 1.0};
    s.h = 1.0 / 64.0;
    const DiscreteSpace space = build_euclidean_grid(s);
    const SpectrumResult sp = eigenvalues(space, Domain::full(space), 3);
    run.check_close(relerr(sp.eigenvalues[0], 2.0 * kPi * kPi), 0.0, 1e-3,
                    "square h=1/64: lambda_1 vs 2 pi^2 (relative)");
    run.check_close(relerr(sp.eigenvalues[1], 5.0 * kPi * kPi), 0.0, 3e-3,
                    "square h=1/64: lambda_2 vs 5 pi^2 (relative)");
    run.check_close(relerr(sp.eigenvalues[2], 5.0 * kPi * kPi), 0.0, 3e-3,
                    "square h=1/64: lambda_3 vs 5 pi^2 (relative)");
  }
  {
    BuilderSpec s;
    s.kind = BuilderKind::Gaussian;
    s.gaussian_q = {1.0};
    s.gaussian_radius = 6.0;
    s.h = 0.05;
    const DiscreteSpace space = build_gaussian_grid(s);
    const SpectrumResult sp = eigenvalues(space, Domain::full(space), 3);
    const double gap = sp.eigenvalues[1] - sp.eigenvalues[0];
    run.check_close(gap, 1.0, 0.02, "gaussian q=1: spectral gap vs 1");
    run.check_close(sp.eigenvalues[2], 2.0, 0.06, "gaussian q=1: lambda_3 vs 2");
  }
  {
    BuilderSpec s;
    s.kind = BuilderKind::Torus;
    s.extent = {1.0, 1.0};
    s.h = 1.0 / 32.0;
    const DiscreteSpace space = build_periodic_torus(s);
    const SpectrumResult sp = eigenvalues(space, Domain::full(space), 2);
    run.check_close(relerr(sp.eigenvalues[1], 4.0 * kPi * kPi), 0.0, 1e-2,
                    "torus h=1/32: lambda_2 vs 4 pi^2 (relative)");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream os;
  os << "runtime " << std::fixed << std::setprecision(2) << secs << " s < 60 s";
  run.check(secs < 60.0, os.str());
}

// ---------------------------------------------------------------- criterion 7
void criterion_7(CriterionRun& run) {
  const std::vector<Objective> objectives = {
      Objective::spectral(PhiFunctional::single(1)),
      Objective::spectral(PhiFunctional::weighted_sum({1.0, 1.0})),
      Objective::energy()};
  int hits = 0, runs = 0;
  bool never_better = true;
  for (int t = 0; t < 30; ++t) {
    const DiscreteSpace g = make_random_graph(12 + (t % 5), 9000 + t);
    const double c = g.total_measure() / 2.0;
    const Objective& obj = objectives[t % 3];
    const OptResult ex = exhaustive_optimize(g, obj, c);
    const OptResult ls = local_search_optimize(g, obj, c, 31 + t, 20);
    ++runs;
    if (ls.best_value < ex.best_value - 1e-9) never_better = false;
    if (ls.best_value <= ex.best_value + 1e-9) ++hits;
  }
  std::ostringstream os;
  os << "local search matched the exhaustive optimum in " << hits << "/" << runs
     << " runs (need >= 27), never improved on it: " << (never_better ? "yes" : "no");
  run.check(hits * 10 >= runs * 9 && never_better, os.str());

  // reference clause as stated; see the header note: under the form-only
  // min-max the budget-2 optimum is (3-sqrt5)/2 on {1,2}
  DiscreteSpace p3 = make_p3();
  const OptResult opt =
      exhaustive_optimize(p3, Objective::spectral(PhiFunctional::single(1)), 2.0);
  const bool value_is_one = std::abs(opt.best_value - 1.0) <= 1e-9;
  const bool at_13 = opt.best_domain == Domain::of_points(p3, {0, 2});
  std::ostringstream os2;
  os2 << "path exhaustive optimum at budget 2: got " << std::setprecision(12)
      << opt.best_value << " on {" << (opt.best_domain.contains(0) ? "1," : "")
      << (opt.best_domain.contains(1) ? "2," : "")
      << (opt.best_domain.contains(2) ? "3" : "") << "}, stated reference: 1 at {1,3}";
  run.check(value_is_one && at_13, os2.str());
}

// ---------------------------------------------------------------- criterion 8
void criterion_8(CriterionRun& run) {
  const auto t0 = std::chrono::steady_clock::now();
  BuilderSpec s;
  s.kind = BuilderKind::Euclidean;
  s.extent = {1.0, 1.0};
  s.h = 1.0 / 64.0;
  const DiscreteSpace space = build_euclidean_grid(s);
  const double c = 0.2;
  const OptResult res = threshold_iterate(space, c, 40);

  const double j01 = 2.404825557695773;
  const double ball_value = kPi * j01 * j01 / c;
  run.check_close(relerr(res.best_value, ball_value), 0.0, 0.05,
                  "rearranged lambda_1 vs the ball value pi j01^2 / c (relative)");

  // axis-aligned square patch of the same measure (largest square inside the
  // final budget), centred in the box
  const int side = static_cast<int>(std::floor(std::sqrt(res.best_domain.measure()) / s.h));
  const GridInfo& g = *space.grid();
  std::vector<bool> mask(space.size(), false);
  const int off = (g.shape[0] - side) / 2;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) mask[g.linear({off + i, off + j})] = true;
  const Domain square(space, mask);
  const double lam_square = eigenvalues(space, square, 1).eigenvalues[0];
  std::ostringstream os;
  os << "rearranged lambda_1 " << std::setprecision(8) << res.best_value
     << " strictly below the square patch value " << lam_square;
  run.check(square.measure() <= res.best_domain.measure() + 1e-12 &&
                res.best_value < lam_square,
            os.str());

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream os2;
  os2 << "runtime " << std::fixed << std::setprecision(2) << secs << " s < 60 s";
  run.check(secs < 60.0, os2.str());
}

// ---------------------------------------------------------------- criterion 9
void criterion_9(CriterionRun& run) {
  BuilderSpec s;
  s.kind = BuilderKind::Torus;
  s.extent = {1.0, 1.0};
  s.h = 1.0 / 8.0;
  const GridHierarchy h = build_hierarchy(s, 4);

  {
    std::vector<Domain> seq;
    double period = 1.0, width = 0.5;
    for (int l = 0; l < 4; ++l) {
      seq.push_back(make_stripes(h.level(l), 0, period, width));
      period /= 2.0;
      width /= 2.0;
    }
    const ConvergenceReport rep = weak_gamma_analyze(h, seq, 3);
    run.check(rep.domination_margin <= 1e-8, "stripes: domination margin <= 1e-8");
    std::ostringstream os;
    os << "stripes: measure drop to " << rep.limit_measure << " <= " << rep.tail_min_measure;
    run.check(rep.null_limit && rep.limit_measure == 0.0 &&
                  rep.tail_min_measure >= 0.5 - 1e-12,
              os.str());
    bool spectral_ok = true;
    for (std::size_t j = 0; j < rep.spectral_margin.size(); ++j)
      if (rep.spectral_margin[j] < -rep.spectral_slack[j]) spectral_ok = false;
    run.check(spectral_ok, rep.spectral_divergence
                               ? "stripes: eigenvalues climb along the tail (empty limit)"
                               : "stripes: spectral margins within slack");
  }
  {
    std::vector<HoleSpec> holes(4, HoleSpec{0.25, 1.0 / 16.0});
    const PerforatedResult res = perforated_study(h, holes, 3);
    run.check(res.report.domination_margin <= 1e-8, "perforated: domination margin <= 1e-8");
    std::ostringstream os;
    os << "perforated: distance to the full torus " << std::setprecision(6)
       << res.distance_to_full << " > 0.05 * " << res.full_torsion_max;
    run.check(res.distance_to_full > 0.05 * res.full_torsion_max, os.str());

    const Domain target = Domain::full(h.level(0));
    const std::vector<Domain> enlarged = enlarge_sequence(h, res.seq, target, 0.5);
    const double d_plain = gamma_distance(h, res.seq[3], 3, target, 0);
    const double d_enl = gamma_distance(h, enlarged[3], 3, target, 0);
    std::ostringstream os2;
    os2 << "enlargement: distance to the target drops from " << std::setprecision(6)
        << d_plain << " to " << d_enl;
    run.check(d_enl < d_plain, os2.str());
  }
}

// --------------------------------------------------------------- criterion 10
void criterion_10(CriterionRun& run) {
  DiscreteSpace p3 = make_p3();
  run.check(capacity(p3, Domain::empty(p3)).value == 0.0, "cap(empty) = 0");

  bool full_ok = std::abs(capacity(p3, Domain::full(p3)).value - p3.total_measure()) <= 1e-10;
  {
    BuilderSpec s;
    s.kind = BuilderKind::Torus;
    s.extent = {1.0, 1.0};
    s.h = 0.125;
    const DiscreteSpace torus = build_periodic_torus(s);
    full_ok = full_ok && std::abs(capacity(torus, Domain::full(torus)).value -
                                  torus.total_measure()) <= 1e-10;
    BuilderSpec gs;
    gs.kind = BuilderKind::Gaussian;
    gs.gaussian_q = {1.0};
    gs.gaussian_radius = 5.0;
    gs.h = 0.25;
    const DiscreteSpace gauss = build_gaussian_grid(gs);
    full_ok = full_ok && std::abs(capacity(gauss, Domain::full(gauss)).value -
                                  gauss.total_measure()) <= 1e-10;
  }
  run.check(full_ok, "cap(X) = m(X) where constants are form-null (path, torus, gaussian)");

  double worst_mono = kInf, worst_mass = kInf, worst_oracle = 0.0;
  for (int t = 0; t < 200; ++t) {
    const DiscreteSpace g = make_random_graph(16, 12000 + t);
    const Domain big = random_domain(g, 12200 + t, 0.5);
    auto rng = make_rng(12400 + t);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<bool> small_mask(g.size(), false);
    for (int p : big.points())
      if (unif(rng) < 0.6) small_mask[p] = true;
    const Domain small(g, small_mask);
    const CapacityResult ca = capacity(g, small);
    const CapacityResult cb = capacity(g, big);
    worst_mono = std::min(worst_mono, cb.value - ca.value);
    worst_mass = std::min(worst_mass, std::min(ca.value - small.measure(),
                                               cb.value - big.measure()));
    worst_oracle =
        std::max(worst_oracle, std::abs(ca.value - qp_capacity_oracle(g, small)));
  }
  std::ostringstream os;
  os << "200 nested pairs: worst monotonicity margin " << std::scientific
     << std::setprecision(2) << worst_mono << ", worst cap - m margin " << worst_mass;
  run.check(worst_mono >= -1e-10 && worst_mass >= -1e-10, os.str());
  std::ostringstream os2;
  os2 << "projected-gradient oracle agreement on all instances of 200 points or fewer, "
         "worst gap "
      << std::scientific << std::setprecision(2) << worst_oracle;
  run.check(worst_oracle <= 1e-8, os2.str());

  const H0EquivalenceReport rep = check_h0_equivalence(p3, Domain::full(p3));
  bool atoms_ok = rep.equivalent;
  for (const auto& atom : rep.atoms) atoms_ok = atoms_ok && atom.cap > 0.0;
  {
    BuilderSpec s;
    s.kind = BuilderKind::Euclidean;
    s.extent = {1.0, 1.0};
    s.h = 0.25;
    const DiscreteSpace grid = build_euclidean_grid(s);
    const H0EquivalenceReport rep2 = check_h0_equivalence(grid, Domain::full(grid));
    atoms_ok = atoms_ok && rep2.equivalent;
    for (const auto& atom : rep2.atoms)
      atoms_ok = atoms_ok && atom.cap > 0.0 && atom.cap >= atom.mass - 1e-10;
  }
  run.check(atoms_ok, "zero-boundary equivalence: cap({x}) > 0 for every atom");
}

// --------------------------------------------------------------- criterion 11
void criterion_11(CriterionRun& run) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "mmshape_acceptance";
  fs::remove_all(base);

  auto read_bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  const std::vector<std::pair<std::string, std::string>> configs = {
      {"solve",
       R"({"task":"solve","space":SPACE,"domain":[0,1],"seed":7,
           "params":{"a":1.0,"f":1.0},"out":"OUT"})"},
      {"optimize",
       R"({"task":"optimize","space":SPACE,"seed":7,
           "params":{"method":"local_search","restarts":4,"c":2.0,
                     "phi":{"kind":"single_k","k":1}},"out":"OUT"})"},
      {"audit",
       R"({"task":"audit","space":SPACE,"seed":7,"params":{"trials":50},"out":"OUT"})"}};

  const std::string space_json = space_to_json(make_p3()).dump();
  for (const auto& [name, tmpl] : configs) {
    std::string bytes[2];
    for (int pass = 0; pass < 2; ++pass) {
      std::string cfg = tmpl;
      cfg.replace(cfg.find("SPACE"), 5, space_json);
      const fs::path out = base / (name + "_" + std::to_string(pass));
      cfg.replace(cfg.find("OUT"), 3, out.string());
      run_experiment(cfg);
      bytes[pass] = read_bytes(out / "result.json");
    }
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
    run.check(same, name + ": repeated run produced byte-identical result.json");
  }
}

struct Criterion {
  int id;
  std::string title;
  void (*fn)(CriterionRun&);
};

const Criterion kCriteria[] = {
    {1, "closed-form micro-instances on the path space", criterion_1},
    {2, "axiom audit across the five builders", criterion_2},
    {3, "comparison principles on seeded instances", criterion_3},
    {4, "penalization rate bound", criterion_4},
    {5, "strong maximum principle and energy sets", criterion_5},
    {6, "continuum spectral oracles", criterion_6},
    {7, "optimizer oracle equivalence", criterion_7},
    {8, "eigenfunction thresholding reaches the ball value", criterion_8},
    {9, "gamma-study suite on the torus hierarchy", criterion_9},
    {10, "capacity suite", criterion_10},
    {11, "reproducibility of experiment outputs", criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    CriterionRun run;
    try {
      c.fn(run);
    } catch (const std::exception& e) {
      run.check(false, std::string("exception: ") + e.what());
    }
    const bool ok = run.passed();
    std::cout << "criterion " << std::setw(2) << c.id << ": " << (ok ? "PASS" : "FAIL")
              << " - " << c.title << "\n";
    run.print(std::cout);
    if (!ok) ++failures;
  }
  return failures;
}
