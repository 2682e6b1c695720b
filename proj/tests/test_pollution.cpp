#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sheetgame/errors.hpp"
#include "sheetgame/pollution.hpp"

using namespace sheetgame;

TEST_CASE("reduction coefficients") {
  Example1Params p;
  Example1Reduction r = example1_reduction(p);
  CHECK(r.alpha == 2.0);
  CHECK(r.beta == 2.0);
  CHECK(r.ratio == 1.0);
  p.a1 = 2.0;
  p.c2 = 3.0;
  r = example1_reduction(p);
  CHECK(r.ratio == 6.0);
  CHECK(r.alpha == 7.0);
  CHECK(r.beta == 38.0);
}

TEST_CASE("reduced problem optimum over a parameter sweep") {
  for (double a1 : {0.5, 1.0, 3.0})
    for (double c2 : {0.25, 1.0, 2.0}) {
      Example1Params p;
      p.a1 = a1;
      p.c2 = c2;
      p.y = 1.5;
      p.T = 2.0;
      const oracle::Emission em{p.a1, p.a2, p.c1, p.c2, p.y, p.T, p.X};
      const double u = example1_reduced_closed_form(p);
      CHECK(u == doctest::Approx(em.reduced_closed_form()).epsilon(1e-12));
      const double golden = oracle::golden_section([&](double v) { return em.reduced_cost(v); }, -10.0, 10.0);
      CHECK(std::abs(u - golden) < 1e-6);
      for (double v : {-1.0, 0.0, 0.7}) CHECK(example1_reduced_cost(p, v) == doctest::Approx(em.reduced_cost(v)));
    }
}

TEST_CASE("parameter validation") {
  Example1Params p;
  p.a2 = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  Example1Params q;
  q.sigma = -1.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  Example2Params r;
  r.beta1 = 0.0;
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("deterministic example 1 solutions") {
  const GridSpec g(1.0, 1.0, 4, 4);
  Example1Params p;
  const EquilibriumSolution reduced = solve_example1(p, g, 1, 100);
  CHECK(reduced.ensemble.n_paths() == 1);
  CHECK(reduced.converged);
  CHECK(std::abs(reduced.controls.u1[0](1, 2) - (-0.4)) < 1e-6);
  CHECK(reduced.controls.u1[0](3, 3) == reduced.controls.u2[0](3, 3));
  const EquilibriumSolution nash = solve_example1(p, g, 1, 1, Example1Formulation::kPlayerwise);
  const oracle::Emission em{1, 1, 1, 1, 1, 1, 1};
  CHECK(std::abs(nash.controls.u1[0](2, 2) - em.nash()[0]) < 1e-6);
}

TEST_CASE("picard reports non-convergence") {
  const GridSpec g(1.0, 1.0, 4, 4);
  PicardOptions o;
  o.max_iter = 2;
  CHECK_THROWS_AS(solve_example1(Example1Params{}, g, 1, 1, Example1Formulation::kReduction, o),
                  ConvergenceError);
}

TEST_CASE("deterministic example 2") {
  const GridSpec g(1.0, 1.0, 4, 4);
  Example2Params p;
  const EquilibriumSolution s = solve_example2(p, g, 1, 1);
  CHECK(s.converged);
  for (int pl = 0; pl < 2; ++pl)
    for (std::size_t k = 0; k < s.L[pl][0].values().size(); ++k)
      CHECK(std::abs(s.L[pl][0].values()[k] + s.states[0].y.values()[k]) < 1e-10);
}

TEST_CASE("symmetric parameters give identical controls") {
  const GridSpec g(1.0, 1.0, 4, 4);
  Example2Params p;
  p.beta1 = p.beta2 = 2.0;
  p.sigma = [](double, double) { return 0.3; };
  const SymmetricReport r = symmetric_case_report(p, g, 5, 50);
  CHECK(r.symmetric_params);
  CHECK(r.pass);
  CHECK(r.max_deviation <= 1e-8);
  Example2Params q;
  q.beta2 = 3.0;
  const SymmetricReport a = symmetric_case_report(q, g, 5, 1);
  CHECK_FALSE(a.symmetric_params);
  CHECK(a.max_deviation > 1e-6);
  REQUIRE(a.superposition_error.has_value());
  CHECK(*a.superposition_error < 1e-6);
}
