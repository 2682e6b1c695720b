#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sheetgame/errors.hpp"
#include "sheetgame/identities.hpp"

using namespace sheetgame;

TEST_CASE("bessel root matches an independent series bisection") {
  const double r_series = oracle::bisect(oracle::j0_sqrt_series, 1.0, 2.0);
  CHECK(std::abs(bessel_root_r0() - r_series) < 1e-10);
  CHECK(std::abs(bessel_root_r0() - 1.445796) < 1e-6);
}

TEST_CASE("well-posedness decision") {
  const WellPosedness w = bspde_wellposedness(0.5, 0.5, 1.0);
  CHECK(w.well_posed);
  CHECK(w.margin == doctest::Approx(std::min(std::sqrt(w.r0) - 0.5, 1.0 - 0.25)));
  CHECK_FALSE(bspde_wellposedness(1.3, 0.1, 1.0).well_posed);
  CHECK_FALSE(bspde_wellposedness(0.1, 1.1, 1.0).well_posed);
  CHECK(bspde_wellposedness(0.0, 0.0, 5.0).well_posed);
  CHECK_THROWS_AS(bspde_wellposedness(-1.0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(bspde_wellposedness(1.0, 0.0, 0.0), ConfigError);
}

TEST_CASE("smooth function derivatives") {
  CHECK_NOTHROW(check_derivatives(SmoothFn::polynomial({1.0, -2.0, 0.5, 0.25})));
  CHECK_NOTHROW(check_derivatives(SmoothFn::exponential(0.7)));
  CHECK_NOTHROW(check_derivatives(SmoothFn::sine()));
  CHECK_NOTHROW(check_derivatives(SmoothFn::power(4)));
  SmoothFn bad = SmoothFn::sine();
  bad.d[2] = [](double y) { return std::sin(y); };
  CHECK_THROWS_AS(check_derivatives(bad), ContractViolation);
  const SmoothFn p = SmoothFn::polynomial({0.0, 1.0, 3.0});
  CHECK(p(2.0) == doctest::Approx(14.0));
  CHECK(p.deriv(1, 2.0) == doctest::Approx(13.0));
  CHECK(p.deriv(3, 2.0) == 0.0);
}

TEST_CASE("identity function satisfies the formula pathwise") {
  const GridSpec g(1.0, 1.0, 6, 6);
  const SheetEnsemble e = sample_sheet(g, 31, 50);
  ProcessSpec s;
  s.y0 = 0.4;
  s.alpha = [](double t, double, double y) { return t - 0.3 * y; };
  s.beta = [](double, double x, double y) { return 1.0 + 0.2 * y * x; };
  s.psi = PairField::constant(g, 0.5);
  ItoCheckOptions o;
  o.mode = CheckMode::kPathwise;
  const ItoReport r = ito_formula_check(SmoothFn::identity(), s, g.corner(), e, o);
  CHECK(r.pass);
  CHECK(r.max_pathwise_error < 1e-10);
}

TEST_CASE("drift-only square is exact") {
  const GridSpec g(1.0, 1.0, 8, 8);
  const SheetEnsemble e = sample_sheet(g, 1, 1);
  ProcessSpec s;
  s.y0 = 1.0;
  s.alpha = [](double t, double x, double) { return 0.5 + t * x; };
  const ItoTerms t = ito_terms(SmoothFn::power(2), s, g.corner(), e, 0);
  CHECK(t.ito == 0.0);
  CHECK(t.double_ito == 0.0);
  CHECK(std::abs(t.lhs - t.deterministic_rhs()) < 1e-12);
}

TEST_CASE("square of a noisy process in expectation") {
  const GridSpec g(1.0, 1.0, 8, 8);
  const std::size_t n = 4000;
  ProcessSpec s;
  s.y0 = 0.5;
  s.alpha = [](double, double, double) { return 0.3; };
  s.beta = [](double, double, double) { return 1.0; };
  const SheetEnsemble fine = sample_sheet(g.refined(), 17, n);
  const SmoothFn f = SmoothFn::power(2);
  ItoCheckOptions o;
  o.allowance = ito_grid_allowance(f, [&](const GridSpec&) { return s; }, g.corner(), fine);
  const ItoReport r = ito_formula_check(f, s, g.corner(), sample_sheet(g, 17, n), o);
  CHECK(r.pass);
  // E[Y^2] = (y0 + 0.3 TX)^2 + TX for constant coefficients.
  CHECK(std::abs(r.lhs.mean - (0.8 * 0.8 + 1.0)) < 4.0 * r.lhs.stderr_);
}

TEST_CASE("coarsening sums 2x2 blocks") {
  const GridSpec g(1.0, 1.0, 4, 6);
  const SheetEnsemble e = sample_sheet(g, 12, 2);
  const SheetEnsemble c = coarsen(e);
  CHECK(c.grid().nt() == 2);
  CHECK(c.increment(1, 1, 2) == doctest::Approx(e.increment(1, 2, 4) + e.increment(1, 3, 4) +
                                                e.increment(1, 2, 5) + e.increment(1, 3, 5)));
  CHECK(c.value(1, {2, 3}) == doctest::Approx(e.value(1, {4, 6})));
  CHECK_THROWS(coarsen(sample_sheet(GridSpec(1.0, 1.0, 3, 4), 1, 1)));
}

TEST_CASE("integration by parts") {
  const GridSpec g(1.0, 1.0, 6, 6);
  const SheetEnsemble e = sample_sheet(g, 99, 3000);
  ProcessSpec a, b;
  a.y0 = 1.0;
  a.alpha = [](double, double, double) { return 0.5; };
  a.beta = [](double, double, double) { return 1.0; };
  b.y0 = -0.5;
  b.alpha = [](double t, double, double) { return t; };
  b.beta = [](double, double x, double) { return 0.5 + x; };
  const ItoReport r = ibp_check(a, b, g.corner(), e);
  CHECK(r.pass);
  std::vector<std::string> names;
  for (const auto& grp : r.groups) names.push_back(grp.name);
  CHECK(names == std::vector<std::string>{"initial", "drift_cross", "diffusion_cross", "wedge_drift", "wedge_psi"});
}
