#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mms/experiment.hpp"

namespace py = pybind11;
using namespace mms;

namespace {

BuilderSpec spec_from_kwargs(const std::string& kind, std::vector<double> extent, double h,
                             std::optional<Mat> finsler_a, std::vector<double> gaussian_q,
                             double gaussian_radius) {
  BuilderSpec spec;
  spec.kind = builder_kind_from_string(kind);
  spec.extent = std::move(extent);
  spec.h = h;
  if (finsler_a) spec.finsler_a = std::move(*finsler_a);
  if (!gaussian_q.empty()) spec.gaussian_q = std::move(gaussian_q);
  spec.gaussian_radius = gaussian_radius;
  return spec;
}

Vec rhs_from_object(const DiscreteSpace& space, const py::object& f) {
  if (py::isinstance<py::float_>(f) || py::isinstance<py::int_>(f))
    return Vec::Constant(space.size(), f.cast<double>());
  return f.cast<Vec>();
}

}  // namespace

PYBIND11_MODULE(_mmshape, m) {
  m.doc() = "Spectral shape optimization on finite metric measure spaces";

  py::register_exception<resource_error>(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);

  py::class_<DiscreteSpace>(m, "Space")
      .def_property_readonly("n", &DiscreteSpace::size)
      .def_property_readonly("measure", [](const DiscreteSpace& s) { return s.measure(); })
      .def_property_readonly("total_measure", &DiscreteSpace::total_measure)
      .def_property_readonly("coords",
                             [](const DiscreteSpace& s) -> std::optional<Mat> {
                               if (!s.has_coords()) return std::nullopt;
                               return s.coords();
                             })
      .def_property_readonly("admissible",
                             [](const DiscreteSpace& s) {
                               std::vector<bool> a(s.size());
                               for (int i = 0; i < s.size(); ++i) a[i] = s.is_admissible(i);
                               return a;
                             })
      .def("to_json", [](const DiscreteSpace& s) { return space_to_json(s).dump(); })
      .def("__repr__", [](const DiscreteSpace& s) {
        return "<mmshape.Space with " + std::to_string(s.size()) + " points>";
      });

  py::class_<Domain>(m, "Domain")
      .def_property_readonly("points", &Domain::points)
      .def_property_readonly("measure", &Domain::measure)
      .def_property_readonly("count", &Domain::count)
      .def("__eq__", [](const Domain& a, const Domain& b) { return a == b; })
      .def("__repr__", [](const Domain& d) {
        return "<mmshape.Domain of " + std::to_string(d.count()) + " points>";
      });

  m.def(
      "grid",
      [](const std::string& kind, std::vector<double> extent, double h,
         std::optional<Mat> finsler_a, std::vector<double> gaussian_q, double gaussian_radius) {
        return build_space(spec_from_kwargs(kind, std::move(extent), h, std::move(finsler_a),
                                            std::move(gaussian_q), gaussian_radius));
      },
      py::arg("kind"), py::arg("extent") = std::vector<double>{1.0}, py::arg("h") = 0.125,
      py::arg("finsler_a") = std::nullopt, py::arg("gaussian_q") = std::vector<double>{},
      py::arg("gaussian_radius") = 6.0);

  m.def("space_from_json",
        [](const std::string& text) { return space_from_json(json::parse(text)); });

  m.def("full_domain", &Domain::full);
  m.def("empty_domain", &Domain::empty);
  m.def("domain_of_points", &Domain::of_points);

  m.def("apply_gradient", &apply_gradient);
  m.def("sobolev_norm", &sobolev_norm);
  m.def("dirichlet_form", py::overload_cast<const DiscreteSpace&, const Vec&, const Vec&>(
                              &dirichlet_form));
  m.def("dirichlet_form",
        py::overload_cast<const DiscreteSpace&, const Vec&>(&dirichlet_form));
  m.def("is_in_h0", &is_in_h0);
  m.def("audit_axioms", [](const DiscreteSpace& s, int trials, std::uint64_t seed) {
    return axiom_report_to_json(audit_axioms(s, trials, seed)).dump();
  });

  m.def(
      "solve_bvp",
      [](const DiscreteSpace& s, const Domain& d, double a, const py::object& f) {
        const BvpSolution sol = solve_bvp(s, d, a, rhs_from_object(s, f));
        return py::make_tuple(sol.w, sol.objective, sol.residual);
      },
      py::arg("space"), py::arg("domain"), py::arg("a") = 1.0, py::arg("f") = 1.0);
  m.def("torsion", [](const DiscreteSpace& s, const Domain& d) {
    const BvpSolution sol = torsion(s, d);
    return py::make_tuple(sol.w, sol.objective, sol.residual);
  });
  m.def("penalized_minimizer", &penalized_minimizer);
  m.def(
      "energy_set_reduce",
      [](const DiscreteSpace& s, const Domain& d, double tau) {
        const EnergySetResult r = energy_set_reduce(s, d, tau);
        return py::make_tuple(r.domain, r.removed_measure);
      },
      py::arg("space"), py::arg("domain"), py::arg("tau_pos") = 1e-12);

  m.def("eigenvalues", [](const DiscreteSpace& s, const Domain& d, int k) {
    const SpectrumResult sp = eigenvalues(s, d, k);
    Mat funcs(s.size(), static_cast<int>(sp.eigenfunctions.size()));
    for (std::size_t j = 0; j < sp.eigenfunctions.size(); ++j)
      funcs.col(static_cast<int>(j)) = sp.eigenfunctions[j];
    return py::make_tuple(sp.eigenvalues, funcs, sp.residuals);
  });
  m.def("dirichlet_energy", &dirichlet_energy);

  m.def("capacity", [](const DiscreteSpace& s, const Domain& d) {
    const CapacityResult r = capacity(s, d);
    return py::make_tuple(r.value, r.potential, r.active_set);
  });
  m.def("quasi_support", &quasi_support, py::arg("space"), py::arg("funcs"),
        py::arg("tau_pos") = 1e-12);

  m.def(
      "optimize",
      [](const DiscreteSpace& s, const std::string& objective, const std::string& phi_json,
         double c, const std::string& method, std::uint64_t seed, int restarts, int iters) {
        Objective obj = objective == "energy"
                            ? Objective::energy()
                            : Objective::spectral(phi_from_json(json::parse(phi_json)));
        OptResult res;
        if (method == "exhaustive")
          res = exhaustive_optimize(s, obj, c);
        else if (method == "threshold")
          res = threshold_iterate(s, c, iters);
        else
          res = local_search_optimize(s, obj, c, seed, restarts);
        return opt_result_to_json(res).dump();
      },
      py::arg("space"), py::arg("objective") = "phi",
      py::arg("phi") = std::string("{\"kind\":\"single_k\",\"k\":1}"), py::arg("c") = 1.0,
      py::arg("method") = "local_search", py::arg("seed") = 0, py::arg("restarts") = 8,
      py::arg("iters") = 30);

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const ExperimentOutcome out = run_experiment(config_text);
        return py::make_tuple(out.result.dump(), out.manifest.dump(),
                              out.out_dir.string());
      },
      py::arg("config"));

  m.attr("__version__") = MMSHAPE_VERSION;
}
