#include <doctest.h>

#include <sstream>

#include "mms/io.hpp"
#include "mms/space.hpp"
#include "support.hpp"

using namespace mms;
using mms::testing::make_p3;
using mms::testing::make_random_graph;

TEST_CASE("pointwise gradient on the path") {
  DiscreteSpace p3 = make_p3();
  Vec u(3);
  u << 0.0, 1.0, 0.0;

  const Vec du = apply_gradient(p3, u);
  CHECK(du[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(du[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(du[2] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

  // integral of Du^2 dm equals the quadratic form exactly
  double integral = 0.0;
  for (int i = 0; i < 3; ++i) integral += du[i] * du[i] * p3.measure_of(i);
  CHECK(integral == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dirichlet_form(p3, u) == doctest::Approx(2.0).epsilon(1e-14));

  CHECK(apply_gradient(p3, Vec::Ones(3)).norm() == 0.0);
  CHECK((apply_gradient(p3, 2.0 * u) - 2.0 * du).lpNorm<Eigen::Infinity>() < 1e-14);

  CHECK_THROWS_AS(apply_gradient(p3, Vec::Ones(2)), std::invalid_argument);
}

TEST_CASE("sobolev norm") {
  DiscreteSpace p3 = make_p3();
  CHECK(sobolev_norm(p3, Vec::Zero(3)) == 0.0);
  CHECK(sobolev_norm(p3, Vec::Ones(3)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  Vec u(3);
  u << 0.0, 1.0, 0.0;
  CHECK(sobolev_norm(p3, u) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("sobolev norm satisfies the triangle inequality on sampled triples") {
  DiscreteSpace g = make_random_graph(17, 7);
  auto rng = make_rng(11);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    Vec u(17), v(17);
    for (int i = 0; i < 17; ++i) {
      u[i] = unif(rng);
      v[i] = unif(rng);
    }
    CHECK(sobolev_norm(g, u + v) <= sobolev_norm(g, u) + sobolev_norm(g, v) + 1e-10);
  }
}

TEST_CASE("bilinear form") {
  DiscreteSpace p3 = make_p3();
  Vec e1 = Vec::Zero(3), e2 = Vec::Zero(3), e3 = Vec::Zero(3);
  e1[0] = e2[1] = e3[2] = 1.0;

  CHECK(dirichlet_form(p3, Vec::Ones(3)) == 0.0);
  CHECK(dirichlet_form(p3, e2, e2) == doctest::Approx(2.0));
  CHECK(dirichlet_form(p3, e1, e3) == doctest::Approx(0.0));
  CHECK(dirichlet_form(p3, e1, e2) == doctest::Approx(dirichlet_form(p3, e2, e1)));

  // form matrix agrees with the row evaluation
  DiscreteSpace g = make_random_graph(12, 3);
  auto rng = make_rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Vec u(12), v(12);
    for (int i = 0; i < 12; ++i) {
      u[i] = unif(rng);
      v[i] = unif(rng);
    }
    CHECK(u.dot(g.form_matrix() * v) == doctest::Approx(dirichlet_form(g, u, v)).epsilon(1e-12));
    CHECK(dirichlet_form(g, u) >= -1e-14);
    const Vec du = apply_gradient(g, u);
    double integral = 0.0;
    for (int i = 0; i < 12; ++i) integral += du[i] * du[i] * g.measure_of(i);
    CHECK(integral == doctest::Approx(dirichlet_form(g, u)).epsilon(1e-12));
  }
}

TEST_CASE("zero boundary membership") {
  DiscreteSpace p3 = make_p3();
  const Domain mid = Domain::of_points(p3, {1});
  CHECK(is_in_h0(p3, mid, Vec::Zero(3), 0.0));
  Vec u(3);
  u << 0.0, 0.5, 0.0;
  CHECK(is_in_h0(p3, mid, u, 0.0));
  u[0] = 0.1;
  CHECK_FALSE(is_in_h0(p3, mid, u, 1e-9));
}

TEST_CASE("domain bookkeeping") {
  DiscreteSpace p3 = make_p3();
  Domain d = Domain::of_points(p3, {0, 1});
  CHECK(d.count() == 2);
  CHECK(d.measure() == doctest::Approx(2.0));
  CHECK(Domain::full(p3).count() == 3);
  CHECK(Domain::empty(p3).measure() == 0.0);
  CHECK_THROWS_AS(Domain::of_points(p3, {5}), std::invalid_argument);
}

TEST_CASE("axiom audit on the path") {
  DiscreteSpace p3 = make_p3();
  const AxiomReport rep = audit_axioms(p3, 200, 42);

  CHECK(rep.get("D1").verdict == Verdict::HoldsExactly);
  CHECK(rep.get("D1").worst_residual <= 1e-12);
  CHECK(rep.get("D3").verdict == Verdict::HoldsExactly);
  CHECK(rep.get("D3").worst_residual <= 1e-12);
  CHECK(rep.get("D2").verdict == Verdict::HoldsExactly);
  CHECK(rep.get("D2").worst_residual <= 1e-10);
  CHECK(rep.get("markov-abs").verdict == Verdict::HoldsAsInequality);
  CHECK(rep.get("markov-abs").ineq_excess <= 1e-10);
  CHECK(rep.get("markov-max").worst_residual <= 1e-10);
  CHECK(rep.get("markov-min").worst_residual <= 1e-10);

  // the selection identity fails on the path stencil and the audit records
  // a counterexample witness
  const AxiomCheck& d4 = rep.get("D4-max");
  CHECK(d4.verdict == Verdict::HoldsAsInequality);
  CHECK(d4.eq_residual > 1e-6);
  REQUIRE(d4.counterexample.has_value());
  CHECK_FALSE(rep.has_violation());
}

TEST_CASE("hand check of the selection counterexample") {
  // u = e_1, v = e_3: at the middle point D(u v v) = 1 but the selected side
  // gives sqrt(1/2)
  DiscreteSpace p3 = make_p3();
  Vec u = Vec::Zero(3), v = Vec::Zero(3);
  u[0] = 1.0;
  v[2] = 1.0;
  const Vec dmax = apply_gradient(p3, u.cwiseMax(v));
  const Vec du = apply_gradient(p3, u);
  const Vec dv = apply_gradient(p3, v);
  CHECK(dmax[1] == doctest::Approx(1.0));
  const double selected = u[1] > v[1] ? du[1] : dv[1];
  CHECK(selected == doctest::Approx(std::sqrt(0.5)));
  CHECK(dmax[1] > selected + 0.1);
}

TEST_CASE("space json round trip") {
  DiscreteSpace g = make_random_graph(9, 21);
  const json j = space_to_json(g);
  DiscreteSpace back = space_from_json(j);
  CHECK(back.size() == g.size());
  CHECK((back.measure() - g.measure()).lpNorm<Eigen::Infinity>() == 0.0);
  auto rng = make_rng(2);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec u(9);
  for (int i = 0; i < 9; ++i) u[i] = unif(rng);
  CHECK(dirichlet_form(back, u) == doctest::Approx(dirichlet_form(g, u)).epsilon(1e-15));
}

TEST_CASE("builder space json round trip keeps the absorbed layer and grid") {
  BuilderSpec s;
  s.kind = BuilderKind::Euclidean;
  s.extent = {1.0, 1.0};
  s.h = 0.25;
  const DiscreteSpace grid = build_euclidean_grid(s);
  const DiscreteSpace back = space_from_json(space_to_json(grid));
  CHECK(back.size() == grid.size());
  CHECK(back.admissible_count() == grid.admissible_count());
  for (int i = 0; i < grid.size(); ++i) CHECK(back.is_admissible(i) == grid.is_admissible(i));
  REQUIRE(back.grid().has_value());
  CHECK(back.grid()->shape == grid.grid()->shape);
  CHECK(back.grid()->periodic == grid.grid()->periodic);
  CHECK((back.coords() - grid.coords()).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("matrix market export") {
  DiscreteSpace p3 = make_p3();
  std::ostringstream os;
  write_matrix_market(os, p3.form_matrix());
  const std::string text = os.str();
  CHECK(text.find("%%MatrixMarket matrix coordinate real symmetric") == 0);
  CHECK(text.find("3 3 5") != std::string::npos);  // tridiagonal lower triangle
}

TEST_CASE("extended reals in json") {
  CHECK(real_to_json(kInf) == json("inf"));
  CHECK(real_from_json(json("inf")) == kInf);
  CHECK(real_from_json(json(2.5)) == 2.5);
}
