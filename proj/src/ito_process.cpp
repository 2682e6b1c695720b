#include "sheetgame/ito_process.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "sheetgame/errors.hpp"

namespace sheetgame {

namespace {

void check_finite(double v, int i, int j, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << ": non-finite value at cell (" << i << ", " << j << ")";
    throw NumericalError(os.str());
  }
}

}  // namespace

double double_integral_increment(const PairField& psi, const SheetEnsemble& ensemble,
                                 std::size_t path, int p, int q) {
  double s = 0.0;
  for (int i = 0; i <= p; ++i) {
    const double dB_row = ensemble.increment(path, i, q);
    for (int jp = 0; jp <= q; ++jp) {
      if (i == p && jp == q) continue;
      s += psi({i, q}, {p, jp}) * dB_row * ensemble.increment(path, p, jp);
    }
  }
  return s;
}

StatePath simulate_process(const ProcessSpec& spec, const SheetEnsemble& ensemble, std::size_t path) {
  const GridSpec& g = ensemble.grid();
  if (path >= ensemble.n_paths()) throw UsageError("simulate_process: path out of range");
  Field y(g, spec.y0, true);
  const double dA = g.cell_area();
  const bool has_psi = !spec.psi.empty();
  for (int i = 0; i < g.nt(); ++i) {
    for (int j = 0; j < g.nx(); ++j) {
      const double yc = y(i, j);
      const double a = spec.alpha(g.t(i), g.x(j), yc);
      const double b = spec.beta(g.t(i), g.x(j), yc);
      check_finite(a, i, j, "simulate_process drift");
      check_finite(b, i, j, "simulate_process diffusion");
      double inc = a * dA + b * ensemble.increment(path, i, j);
      if (has_psi) inc += double_integral_increment(spec.psi, ensemble, path, i, j);
      const double next = y(i + 1, j) + y(i, j + 1) - yc + inc;
      check_finite(next, i, j, "simulate_process state");
      y(i + 1, j + 1) = next;
    }
  }
  return {std::move(y), path};
}

StatePath simulate_controlled_state(const GameModel& model, const Field& u1, const Field& u2,
                                    const SheetEnsemble& ensemble, std::size_t path) {
  if (!u1.adapted() || !u2.adapted()) {
    throw ContractViolation("simulate_controlled_state: controls must be adapted");
  }
  const GridSpec& g = ensemble.grid();
  if (path >= ensemble.n_paths()) throw UsageError("simulate_controlled_state: path out of range");
  Field y(g, model.y0, true);
  const double dA = g.cell_area();
  for (int i = 0; i < g.nt(); ++i) {
    for (int j = 0; j < g.nx(); ++j) {
      const double t = g.t(i);
      const double x = g.x(j);
      const double yc = y(i, j);
      const double a = model.drift(t, x, yc, u1(i, j), u2(i, j));
      const double b = model.diffusion(t, x, yc, u1(i, j), u2(i, j));
      check_finite(a, i, j, "controlled state drift");
      check_finite(b, i, j, "controlled state diffusion");
      const double next = y(i + 1, j) + y(i, j + 1) - yc + a * dA + b * ensemble.increment(path, i, j);
      check_finite(next, i, j, "controlled state");
      y(i + 1, j + 1) = next;
    }
  }
  return {std::move(y), path};
}

double max_derivative_mismatch(const GameModel& m, int samples, double step) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  double worst = 0.0;
  auto check = [&](const ControlledCoefficient& f, const ControlledCoefficient& df, int arg,
                   double t, double x, double y, double u1, double u2) {
    if (!f || !df) return;
    std::array<double, 5> lo{t, x, y, u1, u2};
    std::array<double, 5> hi = lo;
    lo[arg] -= step;
    hi[arg] += step;
    const double fd = (f(hi[0], hi[1], hi[2], hi[3], hi[4]) - f(lo[0], lo[1], lo[2], lo[3], lo[4])) /
                      (2.0 * step);
    const double an = df(t, x, y, u1, u2);
    worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  };
  for (int s = 0; s < samples; ++s) {
    const double t = m.T * unit(rng);
    const double x = m.X * unit(rng);
    const double y = 2.0 * sym(rng);
    const double u1 = sym(rng);
    const double u2 = sym(rng);
    check(m.drift, m.drift_dy, 2, t, x, y, u1, u2);
    check(m.drift, m.drift_du1, 3, t, x, y, u1, u2);
    check(m.drift, m.drift_du2, 4, t, x, y, u1, u2);
    check(m.diffusion, m.diffusion_dy, 2, t, x, y, u1, u2);
    check(m.diffusion, m.diffusion_du1, 3, t, x, y, u1, u2);
    check(m.diffusion, m.diffusion_du2, 4, t, x, y, u1, u2);
    for (const auto& pc : m.players) {
      check(pc.running, pc.running_dy, 2, t, x, y, u1, u2);
      check(pc.running, pc.running_du1, 3, t, x, y, u1, u2);
      check(pc.running, pc.running_du2, 4, t, x, y, u1, u2);
      if (pc.terminal && pc.terminal_dy) {
        const double fd = (pc.terminal(y + step) - pc.terminal(y - step)) / (2.0 * step);
        const double an = pc.terminal_dy(y);
        worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
    }
  }
  return worst;
}

}  // namespace sheetgame
