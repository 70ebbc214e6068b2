#include "mms/experiment.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#ifndef MMSHAPE_VERSION
#define MMSHAPE_VERSION "0.0.0"
#endif

namespace mms {

namespace {

int line_of_token(const std::string& text, const std::string& token) {
  const auto pos = text.find("\"" + token + "\"");
  if (pos == std::string::npos) return -1;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where, const std::string& text) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw config_error("unknown key \"" + key + "\" in " + where, line_of_token(text, key));
}

const std::set<std::string> kTopKeys = {"task", "out", "seed", "builder", "space",
                                        "domain", "params"};
const std::set<std::string> kBuilderKeys = {"kind", "extent", "h", "finsler_a", "gaussian_q",
                                            "gaussian_radius"};
const std::set<std::string> kParamKeys = {
    "a",      "f",        "k",         "c",     "phi",      "objective", "levels",
    "holes",  "trials",   "restarts",  "max_moves", "iters", "sequence", "stripes",
    "method", "tau_pos",  "eps",       "dump_matrix", "dump_fields"};

Domain parse_domain(const json& spec, const DiscreteSpace& space, const std::string& text) {
  if (spec.is_string()) {
    if (spec.get<std::string>() == "full") return Domain::full(space);
    if (spec.get<std::string>() == "empty") return Domain::empty(space);
    throw config_error("domain string must be \"full\" or \"empty\"",
                       line_of_token(text, "domain"));
  }
  if (spec.is_array()) return Domain::of_points(space, spec.get<std::vector<int>>());
  if (spec.is_object()) {
    reject_unknown_keys(spec, {"box", "ball", "stripes", "holes"}, "domain", text);
    if (spec.contains("box")) {
      const auto box = spec.at("box").get<std::vector<std::vector<double>>>();
      std::vector<bool> mask(space.size(), false);
      for (int i = 0; i < space.size(); ++i) {
        if (!space.is_admissible(i)) continue;
        bool in = true;
        for (std::size_t a = 0; a < box.size() && in; ++a)
          in = space.coords()(i, a) >= box[a][0] - 1e-12 &&
               space.coords()(i, a) <= box[a][1] + 1e-12;
        mask[i] = in;
      }
      return Domain(space, std::move(mask));
    }
    if (spec.contains("ball")) {
      const json& b = spec.at("ball");
      const auto center = b.at("center").get<std::vector<double>>();
      const double radius = b.at("radius").get<double>();
      std::vector<bool> mask(space.size(), false);
      for (int i = 0; i < space.size(); ++i) {
        if (!space.is_admissible(i)) continue;
        double d2 = 0.0;
        for (std::size_t a = 0; a < center.size(); ++a) {
          const double dx = space.coords()(i, a) - center[a];
          d2 += dx * dx;
        }
        mask[i] = d2 <= radius * radius + 1e-12;
      }
      return Domain(space, std::move(mask));
    }
    if (spec.contains("stripes")) {
      const json& s = spec.at("stripes");
      return make_stripes(space, s.value("axis", 0), s.at("period").get<double>(),
                          s.at("width").get<double>());
    }
    if (spec.contains("holes")) {
      const json& h = spec.at("holes");
      return remove_holes(space,
                          HoleSpec{h.at("spacing").get<double>(), h.at("radius").get<double>()});
    }
  }
  throw config_error("unsupported domain specification", line_of_token(text, "domain"));
}

Vec parse_rhs(const json& f, const DiscreteSpace& space) {
  if (f.is_number()) return Vec::Constant(space.size(), f.get<double>());
  const auto v = f.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != space.size())
    throw config_error("right-hand side length does not match the space");
  return Eigen::Map<const Vec>(v.data(), v.size());
}

std::vector<double> vec_to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

ExperimentOutcome run_experiment(const std::string& config_text,
                                 const std::map<std::string, std::string>& overrides) {
  const auto t0 = std::chrono::steady_clock::now();

  json cfg;
  try {
    cfg = json::parse(config_text);
  } catch (const json::parse_error& e) {
    const int line =
        1 + static_cast<int>(std::count(config_text.begin(),
                                        config_text.begin() +
                                            std::min(config_text.size(), e.byte),
                                        '\n'));
    throw config_error(std::string("config is not valid JSON: ") + e.what(), line);
  }
  if (!cfg.is_object()) throw config_error("config must be a JSON object");

  // flag overrides beat file values
  for (const auto& [key, value] : overrides) {
    if (key == "seed") cfg["seed"] = std::stoull(value);
    else if (key == "out") cfg["out"] = value;
    else if (key == "levels") cfg["params"]["levels"] = std::stoi(value);
    else if (key == "c") cfg["params"]["c"] = std::stod(value);
    else if (key == "k") cfg["params"]["k"] = std::stoi(value);
    else throw config_error("unknown override flag: " + key);
  }

  reject_unknown_keys(cfg, kTopKeys, "config", config_text);
  if (!cfg.contains("task")) throw config_error("config needs a \"task\"");
  const std::string task = cfg.at("task").get<std::string>();
  const std::uint64_t seed = cfg.value("seed", 0ULL);
  json params = cfg.value("params", json::object());
  reject_unknown_keys(params, kParamKeys, "params", config_text);

  if (cfg.contains("builder") == cfg.contains("space"))
    throw config_error("config needs exactly one of \"builder\" or \"space\"");

  // hierarchy tasks construct their own levels from the builder
  const bool hierarchy_task = task == "gamma-study" || task == "perforated";

  std::optional<BuilderSpec> bspec;
  std::optional<DiscreteSpace> space;
  if (cfg.contains("builder")) {
    reject_unknown_keys(cfg.at("builder"), kBuilderKeys, "builder", config_text);
    bspec = builder_spec_from_json(cfg.at("builder"));
    if (!hierarchy_task) space = build_space(*bspec);
  } else {
    if (hierarchy_task) throw config_error("hierarchy tasks need a builder");
    json sj = cfg.at("space");
    if (sj.is_string()) {
      std::ifstream in(sj.get<std::string>());
      if (!in) throw config_error("cannot open space file: " + sj.get<std::string>());
      sj = json::parse(in);
    }
    space = space_from_json(sj);
  }

  json result;
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, Vec>>>> csv_dumps;
  const double tau_pos = params.value("tau_pos", 1e-12);

  if (task == "audit") {
    const int trials = params.value("trials", 200);
    result["report"] = axiom_report_to_json(audit_axioms(*space, trials, seed));
  } else if (task == "solve") {
    const Domain dom = parse_domain(cfg.value("domain", json("full")), *space, config_text);
    const double a = params.value("a", 1.0);
    const Vec f = parse_rhs(params.value("f", json(1.0)), *space);
    const BvpSolution sol = solve_bvp(*space, dom, a, f);
    result["a"] = a;
    result["w"] = vec_to_std(sol.w);
    result["objective"] = sol.objective;
    result["residual"] = sol.residual;
    csv_dumps.push_back({"field_w.csv", {{"w", sol.w}}});
  } else if (task == "spectrum") {
    const Domain dom = parse_domain(cfg.value("domain", json("full")), *space, config_text);
    const int k = params.value("k", 4);
    const SpectrumResult sr = eigenvalues(*space, dom, k);
    result = spectrum_to_json(sr);
    std::vector<std::pair<std::string, Vec>> fields;
    for (std::size_t j = 0; j < sr.eigenfunctions.size(); ++j)
      fields.push_back({"u" + std::to_string(j), sr.eigenfunctions[j]});
    if (!fields.empty()) csv_dumps.push_back({"field_eigenfunctions.csv", fields});
  } else if (task == "energy") {
    const Domain dom = parse_domain(cfg.value("domain", json("full")), *space, config_text);
    const BvpSolution sol = torsion(*space, dom);
    result["energy"] = sol.objective;
    result["torsion_max"] = sol.w.size() ? sol.w.maxCoeff() : 0.0;
    csv_dumps.push_back({"field_torsion.csv", {{"w", sol.w}}});
  } else if (task == "capacity") {
    const Domain dom = parse_domain(cfg.value("domain", json("full")), *space, config_text);
    const CapacityResult cr = capacity(*space, dom);
    result = capacity_to_json(cr);
    csv_dumps.push_back({"field_potential.csv", {{"u", cr.potential}}});
  } else if (task == "optimize") {
    const double c = params.value("c", space->total_measure() / 2.0);
    const std::string objective = params.value("objective", "phi");
    Objective obj = objective == "energy"
                        ? Objective::energy()
                        : Objective::spectral(params.contains("phi")
                                                  ? phi_from_json(params.at("phi"))
                                                  : PhiFunctional::single(1));
    const std::string method = params.value("method", "local_search");
    OptResult opt;
    if (method == "exhaustive") {
      opt = exhaustive_optimize(*space, obj, c);
    } else if (method == "local_search") {
      opt = local_search_optimize(*space, obj, c, seed, params.value("restarts", 8),
                                  params.value("max_moves", 500));
    } else if (method == "threshold") {
      opt = threshold_iterate(*space, c, params.value("iters", 30));
    } else {
      throw config_error("unknown optimize method: " + method,
                         line_of_token(config_text, "method"));
    }
    result = opt_result_to_json(opt);
    Vec indicator = Vec::Zero(space->size());
    for (int p : opt.best_domain.points()) indicator[p] = 1.0;
    csv_dumps.push_back({"field_indicator.csv", {{"indicator", indicator}}});
  } else if (task == "gamma-study") {
    const int levels = params.value("levels", 4);
    const int k = params.value("k", 3);
    GridHierarchy h = build_hierarchy(*bspec, levels);
    std::vector<Domain> seq;
    const std::string sequence = params.value("sequence", "constant");
    if (sequence == "constant") {
      const Domain coarse =
          parse_domain(cfg.value("domain", json("full")), h.level(0), config_text);
      seq = constant_sequence(h, coarse);
    } else if (sequence == "stripes") {
      const json s = params.value("stripes", json::object());
      const int axis = s.value("axis", 0);
      double period = s.value("period", 1.0);
      double width = s.value("width", 0.5);
      for (int l = 0; l < levels; ++l) {
        seq.push_back(make_stripes(h.level(l), axis, period, width));
        period /= 2.0;
        width /= 2.0;
      }
    } else {
      throw config_error("unknown gamma-study sequence: " + sequence,
                         line_of_token(config_text, "sequence"));
    }
    const ConvergenceReport rep = weak_gamma_analyze(h, seq, k, tau_pos);
    result["report"] = convergence_report_to_json(rep);
    csv_dumps.push_back({"field_limit.csv", {{"w", rep.limit_function}}});
    space = h.level(h.finest());  // for the CSV coordinates
  } else if (task == "perforated") {
    const int levels = params.value("levels", 4);
    const int k = params.value("k", 3);
    GridHierarchy h = build_hierarchy(*bspec, levels);
    std::vector<HoleSpec> holes;
    if (params.contains("holes")) {
      for (const json& hj : params.at("holes"))
        holes.push_back({hj.at("spacing").get<double>(), hj.at("radius").get<double>()});
      if (static_cast<int>(holes.size()) == 1) holes.resize(levels, holes[0]);
    } else {
      holes.resize(levels, HoleSpec{0.25, 0.0625});
    }
    const PerforatedResult pr = perforated_study(h, holes, k);
    result["report"] = convergence_report_to_json(pr.report);
    result["distance_to_full"] = pr.distance_to_full;
    result["full_torsion_max"] = pr.full_torsion_max;
    csv_dumps.push_back({"field_limit.csv", {{"w", pr.report.limit_function}}});
    space = h.level(h.finest());
  } else {
    throw config_error("unknown task: " + task, line_of_token(config_text, "task"));
  }

  ExperimentOutcome outcome;
  outcome.out_dir = cfg.value("out", std::string("results"));
  std::filesystem::create_directories(outcome.out_dir);

  outcome.result = std::move(result);
  {
    std::ofstream rf(outcome.out_dir / "result.json", std::ios::binary);
    rf << outcome.result.dump(2) << "\n";
    outcome.files_written.push_back("result.json");
  }

  if (params.value("dump_fields", true) && space) {
    for (const auto& [name, fields] : csv_dumps) {
      std::ofstream cf(outcome.out_dir / name, std::ios::binary);
      write_field_csv(cf, *space, fields);
      outcome.files_written.push_back(name);
    }
  }
  if (params.value("dump_matrix", false) && space) {
    std::ofstream mf(outcome.out_dir / "form_matrix.mtx", std::ios::binary);
    write_matrix_market(mf, space->form_matrix());
    outcome.files_written.push_back("form_matrix.mtx");
  }

  const auto t1 = std::chrono::steady_clock::now();
  json resolved = cfg;
  resolved["seed"] = seed;
  resolved["params"] = params;
  outcome.manifest = {
      {"resolved_config", resolved},
      {"seed", seed},
      {"versions",
       {{"mmshape", MMSHAPE_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)}}},
      {"wall_time_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()},
      {"tolerances",
       {{"linear_solver_rel_residual", 1e-10},
        {"eigen_residual_scale", 1e-8},
        {"tau_pos", tau_pos},
        {"comparison_tol", 1e-10}}},
      {"files", outcome.files_written}};
  {
    std::ofstream mf(outcome.out_dir / "manifest.json", std::ios::binary);
    mf << outcome.manifest.dump(2) << "\n";
  }
  return outcome;
}

ExperimentOutcome run_experiment_file(const std::filesystem::path& config_path,
                                      const std::map<std::string, std::string>& overrides) {
  std::ifstream in(config_path);
  if (!in) throw config_error("cannot open config file: " + config_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_experiment(ss.str(), overrides);
}

}  // namespace mms
