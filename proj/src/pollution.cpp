#include "sheetgame/pollution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sheetgame/errors.hpp"
#include "sheetgame/parallel.hpp"

namespace sheetgame {

void Example1Params::validate() const {
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw ConfigError("example 1: a1 and a2 must be > 0");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("example 1: c1 and c2 must be > 0");
  if (!(sigma >= 0.0)) throw ConfigError("example 1: sigma must be >= 0");
  if (!(T > 0.0) || !(X > 0.0)) throw ConfigError("example 1: T and X must be > 0");
  if (!std::isfinite(y)) throw ConfigError("example 1: y must be finite");
}

void Example2Params::validate() const {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw ConfigError("example 2: alpha1 and alpha2 must be > 0");
  if (beta1 == 0.0 || beta2 == 0.0 || !std::isfinite(beta1) || !std::isfinite(beta2)) {
    throw ConfigError("example 2: beta1 and beta2 must be nonzero");
  }
  if (!(T > 0.0) || !(X > 0.0)) throw ConfigError("example 2: T and X must be > 0");
  if (!sigma || !source) throw ConfigError("example 2: sigma and source must be set");
}

Example1Reduction example1_reduction(const Example1Params& p) {
  p.validate();
  Example1Reduction r;
  r.ratio = p.c2 * p.a1 / (p.c1 * p.a2);
  r.alpha = 1.0 + r.ratio;
  r.beta = p.a1 + p.c2 * p.c2 * p.a1 * p.a1 / (p.c1 * p.c1 * p.a2);
  return r;
}

double example1_reduced_closed_form(const Example1Params& p) {
  const Example1Reduction r = example1_reduction(p);
  const double c = p.c1 + p.c2;
  return -c * r.alpha * p.y / (r.beta + c * r.alpha * r.alpha * p.T * p.X);
}

double example1_reduced_cost(const Example1Params& p, double u1) {
  const Example1Reduction r = example1_reduction(p);
  const double area = p.T * p.X;
  const double yz = p.y + r.alpha * u1 * area;
  return r.beta * u1 * u1 * area + (p.c1 + p.c2) * yz * yz;
}

GameModel example1_model(const Example1Params& p) {
  p.validate();
  GameModel m;
  m.name = "emission-control";
  m.y0 = p.y;
  m.T = p.T;
  m.X = p.X;
  const double sigma = p.sigma;
  m.drift = [](double, double, double, double u1, double u2) { return u1 + u2; };
  m.drift_dy = [](double, double, double, double, double) { return 0.0; };
  m.drift_du1 = [](double, double, double, double, double) { return 1.0; };
  m.drift_du2 = [](double, double, double, double, double) { return 1.0; };
  m.diffusion = [sigma](double, double, double, double, double) { return sigma; };
  m.drift_partials_constant = true;
  const std::array<double, 2> a{p.a1, p.a2};
  const std::array<double, 2> c{p.c1, p.c2};
  for (int i = 0; i < 2; ++i) {
    PlayerCost& pc = m.players[i];
    const double ai = a[i], ci = c[i];
    if (i == 0) {
      pc.running = [ai](double, double, double, double u1, double) { return ai * u1 * u1; };
      pc.running_du1 = [ai](double, double, double, double u1, double) { return 2.0 * ai * u1; };
      pc.running_du2 = [](double, double, double, double, double) { return 0.0; };
    } else {
      pc.running = [ai](double, double, double, double, double u2) { return ai * u2 * u2; };
      pc.running_du1 = [](double, double, double, double, double) { return 0.0; };
      pc.running_du2 = [ai](double, double, double, double, double u2) { return 2.0 * ai * u2; };
    }
    pc.running_dy = [](double, double, double, double, double) { return 0.0; };
    pc.terminal = [ci](double y) { return ci * y * y; };
    pc.terminal_dy = [ci](double y) { return 2.0 * ci * y; };
  }
  return m;
}

GameModel example2_model(const Example2Params& p) {
  p.validate();
  GameModel m;
  m.name = "two-region";
  m.y0 = p.y;
  m.T = p.T;
  m.X = p.X;
  m.star_coupling = p.star_coupling;
  const double a1 = p.alpha1, a2 = p.alpha2;
  auto source = p.source;
  auto sigma = p.sigma;
  m.drift = [a1, a2, source](double t, double x, double, double u1, double u2) {
    return -a1 * u1 - a2 * u2 + source(t, x);
  };
  m.drift_dy = [](double, double, double, double, double) { return 0.0; };
  m.drift_du1 = [a1](double, double, double, double, double) { return -a1; };
  m.drift_du2 = [a2](double, double, double, double, double) { return -a2; };
  m.diffusion = [sigma](double t, double x, double, double, double) { return sigma(t, x); };
  m.drift_partials_constant = true;
  const std::array<double, 2> b{p.beta1, p.beta2};
  for (int i = 0; i < 2; ++i) {
    PlayerCost& pc = m.players[i];
    const double bi = b[i];
    if (i == 0) {
      pc.running = [bi](double, double, double y, double u1, double) { return 0.5 * y * y + 0.5 * bi * u1 * u1; };
      pc.running_du1 = [bi](double, double, double, double u1, double) { return bi * u1; };
      pc.running_du2 = [](double, double, double, double, double) { return 0.0; };
    } else {
      pc.running = [bi](double, double, double y, double, double u2) { return 0.5 * y * y + 0.5 * bi * u2 * u2; };
      pc.running_du1 = [](double, double, double, double, double) { return 0.0; };
      pc.running_du2 = [bi](double, double, double, double, double u2) { return bi * u2; };
    }
    pc.running_dy = [](double, double, double y, double, double) { return y; };
  }
  return m;
}

const char* to_string(Example1Formulation f) {
  return f == Example1Formulation::kReduction ? "reduction" : "playerwise";
}

namespace {

double sup_diff(const ControlPair& a, const ControlPair& b) {
  double m = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      const auto& x = a[i][k].values();
      const auto& y = b[i][k].values();
      for (std::size_t q = 0; q < x.size(); ++q) m = std::max(m, std::abs(x[q] - y[q]));
    }
  }
  return m;
}

double sup_control(const ControlPair& a) {
  double m = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (const auto& f : a[i]) {
      for (double v : f.values()) m = std::max(m, std::abs(v));
    }
  }
  return m;
}

std::vector<Field> state_fields(const std::vector<StatePath>& states) {
  std::vector<Field> ys;
  ys.reserve(states.size());
  for (const auto& s : states) ys.push_back(s.y);
  return ys;
}

// Damped fixed point u <- u + d (update(u) - u); d is halved whenever the
// residual grows.
template <class Update>
void picard(EquilibriumSolution& sol, bool stochastic, const PicardOptions& options, Update update) {
  double d = options.damping;
  double prev = std::numeric_limits<double>::infinity();
  double res = prev;
  for (int it = 1; it <= options.max_iter; ++it) {
    ControlPair proposal = update(sol.controls);
    res = sup_diff(proposal, sol.controls);
    if (!std::isfinite(res)) throw ConvergenceError("Picard iteration diverged", res);
    sol.residuals.push_back(res);
    sol.iterations = it;
    const double tol = options.tol >= 0.0 ? options.tol
                       : stochastic       ? 1e-4 * std::max(1.0, sup_control(proposal))
                                          : 1e-8;
    if (res <= tol) {
      sol.controls = std::move(proposal);
      sol.converged = true;
      sol.final_damping = d;
      return;
    }
    if (res > prev) d = std::max(options.min_damping, 0.5 * d);
    prev = res;
    for (int i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < proposal[i].size(); ++k) {
        auto& cur = sol.controls[i][k].values();
        const auto& nxt = proposal[i][k].values();
        for (std::size_t q = 0; q < cur.size(); ++q) cur[q] += d * (nxt[q] - cur[q]);
      }
    }
  }
  sol.final_damping = d;
  std::ostringstream os;
  os << "Picard iteration did not converge after " << options.max_iter << " iterations (residual " << res << ")";
  throw ConvergenceError(os.str(), res);
}

void finish(EquilibriumSolution& sol, const GameModel& model) {
  sol.states = simulate_states(model, sol.controls, sol.ensemble);
  for (int i = 0; i < 2; ++i) sol.J[i] = estimate_mean(path_costs(i, model, sol.controls, sol.states));
}

}  // namespace

EquilibriumSolution solve_example1(const Example1Params& params, const GridSpec& grid, std::uint64_t seed,
                                   std::size_t n_paths, Example1Formulation formulation,
                                   const PicardOptions& options) {
  params.validate();
  if (grid.T() != params.T || grid.X() != params.X) throw ConfigError("example 1: grid horizon differs from T, X");
  const GameModel model = example1_model(params);
  const Example1Reduction red = example1_reduction(params);
  const bool stochastic = params.sigma > 0.0;
  const std::size_t N = stochastic ? n_paths : 1;
  EquilibriumSolution sol{std::string("example1/") + to_string(formulation), sample_sheet(grid, seed, N)};
  const ConditionalExpectation ce(sol.ensemble);
  sol.controls = {PathControls(N, Field(grid)), PathControls(N, Field(grid))};

  // E[Y(Z) | F_z] per path, returned as fields.
  auto conditional_terminal = [&](const ControlPair& u) {
    const auto states = simulate_states(model, u, sol.ensemble);
    std::vector<double> target(N);
    for (std::size_t k = 0; k < N; ++k) target[k] = states[k].y(grid.corner());
    const auto ys = state_fields(states);
    CondField cf = ce.field(target, &ys);
    sol.method = std::max(sol.method, cf.method);
    for (auto& w : cf.warnings) sol.warnings.push_back(std::move(w));
    return std::move(cf.fields);
  };

  auto update = [&](const ControlPair& u) {
    const auto ey = conditional_terminal(u);
    ControlPair next{PathControls(N, Field(grid)), PathControls(N, Field(grid))};
    for (std::size_t k = 0; k < N; ++k) {
      for (std::size_t q = 0; q < ey[k].values().size(); ++q) {
        const double m = ey[k].values()[q];
        if (formulation == Example1Formulation::kReduction) {
          const double phat = 2.0 * (params.c1 + params.c2) * m;
          const double u1 = -(red.alpha / (2.0 * red.beta)) * phat;
          next.u1[k].values()[q] = u1;
          next.u2[k].values()[q] = red.ratio * u1;
        } else {
          next.u1[k].values()[q] = -(2.0 * params.c1 * m) / (2.0 * params.a1);
          next.u2[k].values()[q] = -(2.0 * params.c2 * m) / (2.0 * params.a2);
        }
      }
    }
    return next;
  };

  picard(sol, stochastic, options, update);
  const auto ey = conditional_terminal(sol.controls);
  const std::array<double, 2> c{params.c1, params.c2};
  for (int i = 0; i < 2; ++i) {
    sol.p[i] = ey;
    for (auto& f : sol.p[i]) {
      for (double& v : f.values()) v *= 2.0 * c[i];
    }
    sol.L[i].assign(N, Field(grid, 0.0, false));
  }
  finish(sol, model);
  return sol;
}

EquilibriumSolution solve_example2(const Example2Params& params, const GridSpec& grid, std::uint64_t seed,
                                   std::size_t n_paths, const PicardOptions& options) {
  params.validate();
  if (grid.T() != params.T || grid.X() != params.X) throw ConfigError("example 2: grid horizon differs from T, X");
  const GameModel model = example2_model(params);
  bool stochastic = false;
  for (int i = 0; i <= grid.nt(); ++i) {
    for (int j = 0; j <= grid.nx(); ++j) stochastic = stochastic || params.sigma(grid.t(i), grid.x(j)) != 0.0;
  }
  const std::size_t N = stochastic ? n_paths : 1;
  EquilibriumSolution sol{"example2", sample_sheet(grid, seed, N)};
  const ConditionalExpectation ce(sol.ensemble);
  sol.controls = {PathControls(N, Field(grid)), PathControls(N, Field(grid))};
  const double dA = grid.cell_area();
  const double sign = static_cast<double>(static_cast<int>(params.star_coupling));
  const std::array<double, 2> alpha{params.alpha1, params.alpha2};
  const std::array<double, 2> beta{params.beta1, params.beta2};
  std::array<AdjointState, 2> adj;

  // Future strip sums Σ_{[i,nt) x [0,j)} L dA, made F_z-measurable.
  auto adapted_strip = [&](const std::vector<Field>& L, const std::vector<Field>& ys) {
    std::vector<Field> raw(N, Field(grid, 0.0, false));
    for (std::size_t k = 0; k < N; ++k) {
      for (int i = grid.nt() - 1; i >= 0; --i) {
        for (int j = 1; j <= grid.nx(); ++j) {
          raw[k](i, j) = raw[k](i + 1, j) + raw[k](i, j - 1) - raw[k](i + 1, j - 1) + L[k](i, j - 1) * dA;
        }
      }
    }
    if (N == 1) return raw;
    std::vector<Field> out(N, Field(grid));
    std::vector<double> target(N);
    for (int i = 0; i <= grid.nt(); ++i) {
      for (int j = 0; j <= grid.nx(); ++j) {
        for (std::size_t k = 0; k < N; ++k) target[k] = raw[k](i, j);
        const CondValues cv = ce.at(target, {i, j}, &ys);
        sol.method = std::max(sol.method, cv.method);
        if (!cv.warning.empty()) sol.warnings.push_back(cv.warning);
        for (std::size_t k = 0; k < N; ++k) out[k](i, j) = cv.values[k];
      }
    }
    return out;
  };

  auto update = [&](const ControlPair& u) {
    const auto states = simulate_states(model, u, sol.ensemble);
    const auto ys = state_fields(states);
    ControlPair next{PathControls(N, Field(grid)), PathControls(N, Field(grid))};
    for (int pl = 0; pl < 2; ++pl) {
      adj[pl] = solve_adjoint_linear(pl, model, u, states, ce);
      sol.method = std::max(sol.method, adj[pl].method);
      const auto strip = adapted_strip(adj[pl].L, ys);
      for (std::size_t k = 0; k < N; ++k) {
        const Field& L = adj[pl].L[k];
        const Field& p = adj[pl].p[k];
        Field& out = next[pl][k];
        for (int i = 0; i <= grid.nt(); ++i) {
          for (int j = 0; j <= grid.nx(); ++j) {
            const double star1 = L(i, j) * static_cast<double>((grid.nt() - i) * j) * dA + strip[k](i, j);
            out(i, j) = alpha[pl] * (p(i, j) + sign * star1) / beta[pl];
          }
        }
      }
    }
    return next;
  };

  picard(sol, stochastic, options, update);
  finish(sol, model);
  const ControlPair final_controls = sol.controls;
  const auto ys = state_fields(sol.states);
  for (int pl = 0; pl < 2; ++pl) {
    const AdjointState a = solve_adjoint_linear(pl, model, final_controls, sol.states, ce);
    sol.p[pl] = a.p;
    sol.L[pl] = a.L;
  }
  return sol;
}

SymmetricReport symmetric_case_report(const Example2Params& params, const GridSpec& grid, std::uint64_t seed,
                                      std::size_t n_paths, const PicardOptions& options) {
  SymmetricReport rep;
  rep.symmetric_params = params.alpha1 == params.alpha2 && params.beta1 == params.beta2;
  const EquilibriumSolution sol = solve_example2(params, grid, seed, n_paths, options);
  for (std::size_t k = 0; k < sol.controls.u1.size(); ++k) {
    const Field& a = sol.controls.u1[k];
    const Field& b = sol.controls.u2[k];
    for (int i = 0; i <= grid.nt(); ++i) {
      for (int j = 0; j <= grid.nx(); ++j) {
        const double d = std::abs(a(i, j) - b(i, j));
        if (d > rep.max_deviation) {
          rep.max_deviation = d;
          rep.worst_point = {i, j};
          rep.worst_path = k;
        }
      }
    }
  }
  rep.pass = rep.symmetric_params && rep.max_deviation <= 1e-8;
  rep.J = sol.J;
  double s = 0.0;
  for (const auto& st : sol.states) s += st.y(grid.corner());
  rep.mean_terminal_state = s / static_cast<double>(sol.states.size());

  if (sol.controls.u1.size() == 1) {
    Example2Params doubled = params, zero = params;
    doubled.y = 2.0 * params.y;
    zero.y = 0.0;
    const EquilibriumSolution s2 = solve_example2(doubled, grid, seed, 1, options);
    const EquilibriumSolution s0 = solve_example2(zero, grid, seed, 1, options);
    double err = 0.0;
    for (int pl = 0; pl < 2; ++pl) {
      const auto& u = sol.controls[pl][0].values();
      const auto& u2 = s2.controls[pl][0].values();
      const auto& u0 = s0.controls[pl][0].values();
      for (std::size_t q = 0; q < u.size(); ++q) err = std::max(err, std::abs(u2[q] - (2.0 * u[q] - u0[q])));
    }
    rep.superposition_error = err;
  }
  return rep;
}

}  // namespace sheetgame
