#include <cmath>

#include "doctest.h"
#include "sheetgame/errors.hpp"
#include "sheetgame/ito_process.hpp"
#include "sheetgame/plane_calculus.hpp"

using namespace sheetgame;

TEST_CASE("deterministic and pure-noise processes") {
  const GridSpec g(1.0, 2.0, 5, 7);
  const SheetEnsemble e = sample_sheet(g, 1, 2);
  ProcessSpec s;
  s.y0 = 0.5;
  s.alpha = [](double, double, double) { return 3.0; };
  const StatePath a = simulate_process(s, e, 0);
  for (int i = 0; i <= g.nt(); ++i)
    for (int j = 0; j <= g.nx(); ++j) CHECK(a.y(i, j) == doctest::Approx(0.5 + 3.0 * g.t(i) * g.x(j)));
  ProcessSpec n;
  n.y0 = -1.0;
  n.beta = [](double, double, double) { return 1.0; };
  const StatePath b = simulate_process(n, e, 1);
  for (int i = 0; i <= g.nt(); ++i)
    for (int j = 0; j <= g.nx(); ++j) CHECK(b.y(i, j) == doctest::Approx(-1.0 + e.value(1, i, j)).epsilon(1e-14));
}

TEST_CASE("state-dependent coefficients against a brute-force sweep") {
  const GridSpec g(1.0, 1.0, 6, 5);
  const SheetEnsemble e = sample_sheet(g, 8, 1);
  ProcessSpec s;
  s.y0 = 0.2;
  s.alpha = [](double t, double x, double y) { return t - y * x; };
  s.beta = [](double, double x, double y) { return 0.5 + 0.3 * std::sin(y) + x; };
  const StatePath r = simulate_process(s, e, 0);
  std::vector<std::vector<double>> Y(g.nt() + 1, std::vector<double>(g.nx() + 1, s.y0));
  for (int i = 1; i <= g.nt(); ++i)
    for (int j = 1; j <= g.nx(); ++j) {
      double v = s.y0;
      for (int a = 0; a < i; ++a)
        for (int b = 0; b < j; ++b) {
          const double t = g.t(a), x = g.x(b), y = Y[a][b];
          v += s.alpha(t, x, y) * g.cell_area() + s.beta(t, x, y) * e.increment(0, a, b);
        }
      Y[i][j] = v;
    }
  for (int i = 0; i <= g.nt(); ++i)
    for (int j = 0; j <= g.nx(); ++j) CHECK(r.y(i, j) == doctest::Approx(Y[i][j]).epsilon(1e-12));
}

TEST_CASE("double integral increments add up") {
  const GridSpec g(1.0, 1.0, 4, 4);
  const SheetEnsemble e = sample_sheet(g, 21, 1);
  PairField psi = PairField::constant(g, 0.7);
  double acc = 0.0;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 4; ++q) acc += double_integral_increment(psi, e, 0, p, q);
  CHECK(acc == doctest::Approx(double_ito_integral(psi, e, 0, {3, 4})).epsilon(1e-13));
  ProcessSpec s;
  s.psi = psi;
  const StatePath r = simulate_process(s, e, 0);
  CHECK(r.y(3, 4) == doctest::Approx(acc).epsilon(1e-13));
}

TEST_CASE("non-finite states are reported") {
  const GridSpec g(1.0, 1.0, 3, 3);
  const SheetEnsemble e = sample_sheet(g, 2, 1);
  ProcessSpec s;
  s.y0 = 1.0;
  s.alpha = [](double, double, double y) { return 1e308 * y * y; };
  CHECK_THROWS_AS(simulate_process(s, e, 0), NumericalError);
}

namespace {

GameModel linear_model() {
  GameModel m;
  m.name = "linear";
  m.y0 = 1.0;
  m.drift = [](double, double, double y, double u1, double u2) { return u1 + 2.0 * u2 - 0.5 * y; };
  m.drift_dy = [](double, double, double, double, double) { return -0.5; };
  m.drift_du1 = [](double, double, double, double, double) { return 1.0; };
  m.drift_du2 = [](double, double, double, double, double) { return 2.0; };
  m.diffusion = [](double, double, double, double, double) { return 0.3; };
  m.diffusion_dy = [](double, double, double, double, double) { return 0.0; };
  m.diffusion_du1 = m.diffusion_dy;
  m.diffusion_du2 = m.diffusion_dy;
  for (auto& p : m.players) {
    p.running = [](double, double, double y, double u1, double u2) { return y * y + u1 * u1 + u2 * u2; };
    p.running_dy = [](double, double, double y, double, double) { return 2 * y; };
    p.running_du1 = [](double, double, double, double u1, double) { return 2 * u1; };
    p.running_du2 = [](double, double, double, double, double u2) { return 2 * u2; };
    p.terminal = [](double y) { return y * y; };
    p.terminal_dy = [](double y) { return 2 * y; };
  }
  return m;
}

}  // namespace

TEST_CASE("controlled state") {
  const GridSpec g(1.0, 1.0, 4, 4);
  const SheetEnsemble e = sample_sheet(g, 4, 1);
  GameModel m = linear_model();
  m.diffusion = [](double, double, double, double, double) { return 0.0; };
  m.drift = [](double, double, double, double u1, double u2) { return u1 + 2.0 * u2; };
  const StatePath s = simulate_controlled_state(m, Field::constant(g, 0.25), Field::constant(g, -1.0), e, 0);
  CHECK(s.y(4, 4) == doctest::Approx(1.0 + (0.25 - 2.0)));
  CHECK(s.y(2, 3) == doctest::Approx(1.0 + (0.25 - 2.0) * 0.5 * 0.75));
  Field bad = Field::constant(g, 0.0);
  bad.set_adapted(false);
  CHECK_THROWS_AS(simulate_controlled_state(m, bad, bad, e, 0), ContractViolation);
}

TEST_CASE("derivative spot check") {
  GameModel m = linear_model();
  CHECK(max_derivative_mismatch(m) < 1e-6);
  m.drift_du2 = [](double, double, double, double, double) { return 1.0; };
  CHECK(max_derivative_mismatch(m) > 0.1);
}
