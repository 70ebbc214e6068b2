#include "mms/io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace mms {

json real_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

double real_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::invalid_argument("not an extended real: " + s);
  }
  return j.get<double>();
}

json space_to_json(const DiscreteSpace& space) {
  json j;
  j["n"] = space.size();
  j["measure"] = std::vector<double>(space.measure().data(),
                                     space.measure().data() + space.size());
  json rows = json::array();
  for (const GradientRow& r : space.grad().rows())
    rows.push_back({{"idx", r.idx}, {"coef", r.coef}, {"weight", r.weight}, {"loc", r.location}});
  j["rows"] = std::move(rows);
  if (space.has_coords()) {
    json coords = json::array();
    for (int i = 0; i < space.size(); ++i) {
      json row = json::array();
      for (int a = 0; a < space.coords().cols(); ++a) row.push_back(space.coords()(i, a));
      coords.push_back(std::move(row));
    }
    j["coords"] = std::move(coords);
  }
  if (!space.labels().empty()) j["labels"] = space.labels();
  if (space.admissible_count() != space.size()) {
    std::vector<int> adm(space.size());
    for (int i = 0; i < space.size(); ++i) adm[i] = space.is_admissible(i) ? 1 : 0;
    j["admissible"] = std::move(adm);
  }
  if (space.grid()) {
    const GridInfo& g = *space.grid();
    j["grid"] = {{"shape", g.shape},
                 {"spacing", g.spacing},
                 {"origin", g.origin},
                 {"periodic", g.periodic}};
  }
  return j;
}

DiscreteSpace space_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  const auto mv = j.at("measure").get<std::vector<double>>();
  if (static_cast<int>(mv.size()) != n)
    throw std::invalid_argument("space json: measure length mismatch");
  Vec measure = Eigen::Map<const Vec>(mv.data(), n);

  GradientOperator grad;
  for (const json& r : j.at("rows")) {
    GradientRow row;
    row.idx = r.at("idx").get<std::vector<int>>();
    row.coef = r.at("coef").get<std::vector<double>>();
    row.weight = r.at("weight").get<double>();
    row.location = r.at("loc").get<int>();
    grad.add_row(std::move(row));
  }

  std::optional<Mat> coords;
  if (j.contains("coords")) {
    const json& jc = j.at("coords");
    if (!jc.empty()) {
      Mat c(n, jc.at(0).size());
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < c.cols(); ++a) c(i, a) = jc.at(i).at(a).get<double>();
      coords = std::move(c);
    }
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<bool> admissible;
  if (j.contains("admissible")) {
    for (const json& v : j.at("admissible")) admissible.push_back(v.get<int>() != 0);
  }

  DiscreteSpace space(std::move(measure), std::move(grad), std::move(coords), std::move(labels),
                      std::move(admissible));
  if (j.contains("grid")) {
    GridInfo g;
    g.shape = j.at("grid").at("shape").get<std::vector<int>>();
    g.spacing = j.at("grid").at("spacing").get<std::vector<double>>();
    g.origin = j.at("grid").at("origin").get<std::vector<double>>();
    g.periodic = j.at("grid").at("periodic").get<bool>();
    space.set_grid(std::move(g));
  }
  return space;
}

json axiom_report_to_json(const AxiomReport& report) {
  json j;
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  json checks = json::array();
  for (const AxiomCheck& c : report.checks) {
    json e = {{"axiom", c.axiom},
              {"verdict", to_string(c.verdict)},
              {"worst_residual", c.worst_residual},
              {"equality_residual", c.eq_residual},
              {"inequality_excess", c.ineq_excess}};
    if (c.counterexample) {
      const Counterexample& ce = *c.counterexample;
      e["counterexample"] = {
          {"point", ce.point},
          {"seed", ce.seed},
          {"note", ce.note},
          {"u", std::vector<double>(ce.u.data(), ce.u.data() + ce.u.size())},
          {"v", std::vector<double>(ce.v.data(), ce.v.data() + ce.v.size())}};
    }
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j;
}

json spectrum_to_json(const SpectrumResult& result) {
  json values = json::array();
  for (double l : result.eigenvalues) values.push_back(real_to_json(l));
  return {{"eigenvalues", std::move(values)}, {"residuals", result.residuals}};
}

json opt_result_to_json(const OptResult& result) {
  json trace = json::array();
  for (const TraceEntry& t : result.trace)
    trace.push_back({{"move", t.move}, {"value", real_to_json(t.value)}});
  return {{"method", result.method},
          {"best_value", real_to_json(result.best_value)},
          {"best_domain", result.best_domain.points()},
          {"best_measure", result.best_domain.measure()},
          {"evaluations", result.evaluations},
          {"trace", std::move(trace)}};
}

json convergence_report_to_json(const ConvergenceReport& r) {
  json lambda_limit = json::array();
  for (double l : r.lambda_limit) lambda_limit.push_back(real_to_json(l));
  return {{"tau_pos", r.tau_pos},
          {"torsion_norms", r.torsion_norms},
          {"pairwise_distances", r.pairwise_distances},
          {"null_limit", r.null_limit},
          {"limit_measure", r.limit_measure},
          {"tail_min_measure", r.tail_min_measure},
          {"measure_margin", r.measure_margin},
          {"domination_margin", r.domination_margin},
          {"domination_gap_over", r.domination_gap_over},
          {"spectral_divergence", r.spectral_divergence},
          {"lambda_limit", std::move(lambda_limit)},
          {"lambda_tail_min", r.lambda_tail_min},
          {"spectral_margin", r.spectral_margin},
          {"spectral_slack", r.spectral_slack},
          {"energy_limit", r.energy_limit},
          {"energy_tail_min", r.energy_tail_min},
          {"energy_margin", r.energy_margin},
          {"energy_slack", r.energy_slack},
          {"limit_in_h0", r.limit_in_h0},
          {"summary", r.summary}};
}

json comparison_report_to_json(const ComparisonReport& r) {
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"worst_domain_margin", r.worst_domain_margin},
          {"worst_reaction_margin", r.worst_reaction_margin},
          {"worst_rhs_margin", r.worst_rhs_margin}};
}

json capacity_to_json(const CapacityResult& r) {
  return {{"value", r.value},
          {"active_set", r.active_set.points()},
          {"active_measure", r.active_set.measure()}};
}

json phi_to_json(const PhiFunctional& phi) {
  switch (phi.kind) {
    case PhiFunctional::Kind::SingleK: return {{"kind", "single_k"}, {"k", phi.index}};
    case PhiFunctional::Kind::WeightedSum:
      return {{"kind", "weighted_sum"}, {"weights", phi.weights}};
    case PhiFunctional::Kind::MaxOf: return {{"kind", "max_of"}, {"indices", phi.indices}};
  }
  throw std::logic_error("unknown functional kind");
}

PhiFunctional phi_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "single_k") return PhiFunctional::single(j.at("k").get<int>());
  if (kind == "weighted_sum")
    return PhiFunctional::weighted_sum(j.at("weights").get<std::vector<double>>());
  if (kind == "max_of") return PhiFunctional::max_of(j.at("indices").get<std::vector<int>>());
  throw std::invalid_argument("unknown functional kind: " + kind);
}

json builder_spec_to_json(const BuilderSpec& spec) {
  json j = {{"kind", to_string(spec.kind)}, {"extent", spec.extent}, {"h", spec.h}};
  if (spec.finsler_a) {
    json a = json::array();
    for (int r = 0; r < spec.finsler_a->rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < spec.finsler_a->cols(); ++c) row.push_back((*spec.finsler_a)(r, c));
      a.push_back(std::move(row));
    }
    j["finsler_a"] = std::move(a);
  }
  if (spec.kind == BuilderKind::Gaussian) {
    j["gaussian_q"] = spec.gaussian_q;
    j["gaussian_radius"] = spec.gaussian_radius;
  }
  return j;
}

BuilderSpec builder_spec_from_json(const json& j) {
  BuilderSpec spec;
  spec.kind = builder_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("extent")) spec.extent = j.at("extent").get<std::vector<double>>();
  spec.h = j.at("h").get<double>();
  if (j.contains("finsler_a")) {
    const json& a = j.at("finsler_a");
    Mat m(a.size(), a.at(0).size());
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) m(r, c) = a.at(r).at(c).get<double>();
    spec.finsler_a = std::move(m);
  }
  if (j.contains("gaussian_q")) spec.gaussian_q = j.at("gaussian_q").get<std::vector<double>>();
  if (j.contains("gaussian_radius"))
    spec.gaussian_radius = j.at("gaussian_radius").get<double>();
  return spec;
}

void write_matrix_market(std::ostream& os, const SpMat& m) {
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::size_t count = 0;
  for (int col = 0; col < m.outerSize(); ++col)
    for (SpMat::InnerIterator it(m, col); it; ++it)
      if (it.row() >= it.col()) ++count;
  os << m.rows() << " " << m.cols() << " " << count << "\n";
  os << std::setprecision(17);
  for (int col = 0; col < m.outerSize(); ++col)
    for (SpMat::InnerIterator it(m, col); it; ++it)
      if (it.row() >= it.col())
        os << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

void write_field_csv(std::ostream& os, const DiscreteSpace& space,
                     const std::vector<std::pair<std::string, Vec>>& fields) {
  os << "index";
  const int d = space.has_coords() ? static_cast<int>(space.coords().cols()) : 0;
  for (int a = 0; a < d; ++a) os << ",x" << a;
  for (const auto& [name, _] : fields) os << "," << name;
  os << "\n";
  os << std::setprecision(17);
  for (int i = 0; i < space.size(); ++i) {
    os << i;
    for (int a = 0; a < d; ++a) os << "," << space.coords()(i, a);
    for (const auto& [_, v] : fields) os << "," << v[i];
    os << "\n";
  }
}

}  // namespace mms
