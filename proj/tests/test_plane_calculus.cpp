#include <cmath>

#include "doctest.h"
#include "sheetgame/errors.hpp"
#include "sheetgame/plane_calculus.hpp"

using namespace sheetgame;

namespace {

// Brute-force pair sums over ordered distinct cells c = (a, b), c' = (p, q)
// of R_z with a <= p and b >= q.
template <class F>
double wedge_pairs(GridPoint z, F&& term) {
  double acc = 0.0;
  for (int a = 0; a < z.i; ++a)
    for (int b = 0; b < z.j; ++b)
      for (int p = 0; p < z.i; ++p)
        for (int q = 0; q < z.j; ++q) {
          if ((a == p && b == q) || a > p || b < q) continue;
          acc += term(a, b, p, q);
        }
  return acc;
}

}  // namespace

TEST_CASE("wedge indicator") {
  CHECK(indicator_wedge(PlanePoint{0.2, 0.8}, PlanePoint{0.5, 0.3}));
  CHECK_FALSE(indicator_wedge(PlanePoint{0.6, 0.8}, PlanePoint{0.5, 0.3}));
  CHECK_FALSE(indicator_wedge(PlanePoint{0.2, 0.1}, PlanePoint{0.5, 0.3}));
  CHECK(indicator_wedge(CellIndex{1, 1}, CellIndex{1, 1}));
}

TEST_CASE("lebesgue sums read lower-left corners") {
  const GridSpec g(1.0, 2.0, 5, 4);
  CHECK(lebesgue_integral(Field::constant(g, 3.0), GridPoint{5, 4}) == doctest::Approx(6.0));
  const Field phi = Field::from_function(g, [](double t, double x) { return t * t + x; });
  double expect = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) expect += (g.t(i) * g.t(i) + g.x(j)) * g.cell_area();
  CHECK(lebesgue_integral(phi, GridPoint{3, 2}) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(lebesgue_integral(phi, PlanePoint{0.6, 1.0}) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("ito sums") {
  const GridSpec g(1.0, 1.0, 4, 6);
  const SheetEnsemble e = sample_sheet(g, 5, 2);
  const GridPoint z{3, 5};
  CHECK(ito_integral(Field::constant(g, 1.0), e, 1, z) == doctest::Approx(e.value(1, z)).epsilon(1e-14));
  const Field phi = Field::from_function(g, [](double t, double x) { return std::sin(t + 2 * x); });
  double expect = 0.0;
  for (int i = 0; i < z.i; ++i)
    for (int j = 0; j < z.j; ++j) expect += phi(i, j) * e.increment(0, i, j);
  CHECK(ito_integral(phi, e, 0, z) == doctest::Approx(expect).epsilon(1e-14));
  Field anticipating = phi;
  anticipating.set_adapted(false);
  CHECK_THROWS_AS(ito_integral(anticipating, e, 0, z), ContractViolation);
}

TEST_CASE("double and mixed sums against brute force") {
  const GridSpec g(1.0, 1.0, 4, 4);
  const SheetEnsemble e = sample_sheet(g, 77, 1);
  PairField psi(g);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) psi({a, b}, {p, q}) = 1.0 + 0.1 * a - 0.2 * q + 0.05 * b * p;
  const GridPoint z{4, 3};
  const double dA = g.cell_area();
  const double dbl = wedge_pairs(z, [&](int a, int b, int p, int q) {
    return psi({a, b}, {p, q}) * e.increment(0, a, b) * e.increment(0, p, q);
  });
  const double m1 = wedge_pairs(z, [&](int a, int b, int p, int q) {
    return psi({a, b}, {p, q}) * dA * e.increment(0, p, q);
  });
  const double m2 = wedge_pairs(z, [&](int a, int b, int p, int q) {
    return psi({a, b}, {p, q}) * e.increment(0, a, b) * dA;
  });
  CHECK(double_ito_integral(psi, e, 0, z) == doctest::Approx(dbl).epsilon(1e-13));
  const auto [first, second] = mixed_integrals(psi, e, 0, z);
  CHECK(first == doctest::Approx(m1).epsilon(1e-13));
  CHECK(second == doctest::Approx(m2).epsilon(1e-13));
}

TEST_CASE("star operator") {
  const GridSpec g(2.0, 1.0, 8, 4);
  const Field h = Field::constant(g, 1.5);
  const Field k = Field::constant(g, -2.0);
  const GridPoint z{3, 2};
  // 2 h k (T - t) x for constants
  CHECK(star(h, k, z, g.corner()) == doctest::Approx(2 * 1.5 * -2.0 * (2.0 - 0.75) * 0.5));
  const Field a = Field::from_function(g, [](double t, double x) { return t + x * x; });
  const Field b = Field::from_function(g, [](double t, double x) { return std::cos(t - x); });
  const Field s = star_field(a, b, g.corner());
  for (int i = 0; i <= g.nt(); ++i)
    for (int j = 0; j <= g.nx(); ++j) {
      double expect = 0.0;
      for (int p = i; p < g.nt(); ++p)
        for (int q = 0; q < j; ++q) expect += (a(i, j) * b(p, q) + a(p, q) * b(i, j)) * g.cell_area();
      CHECK(s(i, j) == doctest::Approx(expect).epsilon(1e-12));
      CHECK(star(a, b, {i, j}, g.corner()) == doctest::Approx(expect).epsilon(1e-12));
    }
  CHECK_THROWS_AS(star(a, b, {5, 2}, {4, 4}), UsageError);
}

TEST_CASE("star double integral identity") {
  const GridSpec g(1.0, 1.0, 5, 6);
  const Field a1 = Field::from_function(g, [](double t, double x) { return 1.0 + t * x; });
  const Field a2 = Field::from_function(g, [](double t, double x) { return std::exp(-t) - x; });
  for (GridPoint z : {GridPoint{5, 6}, GridPoint{3, 4}, GridPoint{1, 6}}) {
    const auto [lhs, rhs] = star_double_identity(a1, a2, z);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("conditional projection of the sheet") {
  const GridSpec g(1.0, 1.0, 6, 6);
  const SheetEnsemble e = sample_sheet(g, 3, 1);
  CHECK(conditional_projection({5, 2}, {3, 4}, e, 0) == e.value(0, 3, 2));
  CHECK(conditional_projection({1, 2}, {3, 4}, e, 0) == e.value(0, 1, 2));
  CHECK(conditional_projection({6, 6}, {3, 4}, e, 0) == e.value(0, 3, 4));
}

TEST_CASE("wedge quadrature") {
  const GridSpec g(1.0, 1.0, 4, 5);
  const Field a1 = Field::from_function(g, [](double t, double x) { return t - x; });
  const Field a2 = Field::from_function(g, [](double t, double x) { return 2.0 + t * x; });
  const GridPoint z{4, 5};
  const double dA = g.cell_area();
  double expect = wedge_pairs(z, [&](int a, int b, int p, int q) {
    return (a1(p, q) * a2(a, b) + a1(a, b) * a2(p, q)) * dA * dA;
  });
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) expect += a1(i, j) * a2(i, j) * dA * dA;
  CHECK(wedge_quadrature(a1, a2, z) == doctest::Approx(expect).epsilon(1e-13));
}
