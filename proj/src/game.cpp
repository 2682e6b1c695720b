#include "sheetgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sheetgame/errors.hpp"
#include "sheetgame/parallel.hpp"
#include "sheetgame/plane_calculus.hpp"

namespace sheetgame {

namespace {

double eval(const ControlledCoefficient& f, double t, double x, double y, double u1, double u2) {
  return f ? f(t, x, y, u1, u2) : 0.0;
}

const ControlledCoefficient& running_du(const PlayerCost& c, int player) {
  return player == 0 ? c.running_du1 : c.running_du2;
}

// S(z) = (L ⋆ a_z)(z) with a_z(ζ') = partial(ζ', y(z), u1(z), u2(z)) and
// horizon at the grid corner.
Field star_frozen(const Field& L, const ControlledCoefficient& partial, const GameModel& model,
                  const Field& y, const Field& u1, const Field& u2) {
  const GridSpec& g = L.grid();
  Field out(g, 0.0, false);
  if (!partial) return out;
  const bool zero_L = std::all_of(L.values().begin(), L.values().end(), [](double v) { return v == 0.0; });
  if (zero_L) return out;
  if (model.drift_partials_constant) {
    const double a = partial(0.0, 0.0, 0.0, 0.0, 0.0);
    return star_field(L, Field::constant(g, a), g.corner());
  }
  const double dA = g.cell_area();
  for (int i = 0; i <= g.nt(); ++i) {
    for (int j = 0; j <= g.nx(); ++j) {
      const double yz = y(i, j), a1 = u1(i, j), a2 = u2(i, j);
      double sum_a = 0.0, sum_L = 0.0;
      for (int s = i; s < g.nt(); ++s) {
        for (int r = 0; r < j; ++r) {
          sum_a += partial(g.t(s), g.x(r), yz, a1, a2);
          sum_L += L(s, r);
        }
      }
      out(i, j) = (L(i, j) * sum_a + partial(g.t(i), g.x(j), yz, a1, a2) * sum_L) * dA;
    }
  }
  return out;
}

double sup_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Field> state_fields(const std::vector<StatePath>& states) {
  std::vector<Field> ys;
  ys.reserve(states.size());
  for (const auto& s : states) ys.push_back(s.y);
  return ys;
}

void require_supported(int player, const GameModel& model, const ControlPair& controls,
                       const std::vector<StatePath>& states) {
  const auto& bdu = model.diffusion_du(player);
  if (!model.diffusion_dy && !bdu) return;
  const GridSpec& g = states.front().y.grid();
  for (const auto& s : states) {
    const Field& u1 = on_path(controls.u1, s.path);
    const Field& u2 = on_path(controls.u2, s.path);
    for (int i = 0; i <= g.nt(); ++i) {
      for (int j = 0; j <= g.nx(); ++j) {
        const double t = g.t(i), x = g.x(j), y = s.y(i, j);
        if (std::abs(eval(model.diffusion_dy, t, x, y, u1(i, j), u2(i, j))) > 1e-14 ||
            std::abs(eval(bdu, t, x, y, u1(i, j), u2(i, j))) > 1e-14) {
          throw UnsupportedModel("solve_adjoint_linear: diffusion depends on the state or on the player's "
                                 "control; q is not extracted");
        }
      }
    }
  }
}

}  // namespace

ControlPair constant_controls(const GridSpec& grid, double u1, double u2) {
  return {{Field::constant(grid, u1)}, {Field::constant(grid, u2)}};
}

std::vector<StatePath> simulate_states(const GameModel& model, const ControlPair& controls,
                                       const SheetEnsemble& ensemble) {
  std::vector<StatePath> out(ensemble.n_paths());
  parallel_for(out.size(), [&](std::size_t p) {
    out[p] = simulate_controlled_state(model, on_path(controls.u1, p), on_path(controls.u2, p), ensemble, p);
  });
  return out;
}

std::vector<double> path_costs(int player, const GameModel& model, const ControlPair& controls,
                               const std::vector<StatePath>& states) {
  const PlayerCost& pc = model.players[player];
  std::vector<double> out(states.size());
  parallel_for(out.size(), [&](std::size_t k) {
    const StatePath& s = states[k];
    const GridSpec& g = s.y.grid();
    const Field& u1 = on_path(controls.u1, s.path);
    const Field& u2 = on_path(controls.u2, s.path);
    double run = 0.0;
    for (int i = 0; i < g.nt(); ++i) {
      for (int j = 0; j < g.nx(); ++j) run += eval(pc.running, g.t(i), g.x(j), s.y(i, j), u1(i, j), u2(i, j));
    }
    out[k] = run * g.cell_area() + (pc.terminal ? pc.terminal(s.y(g.corner())) : 0.0);
  });
  return out;
}

MeanEstimate expected_cost(int player, const GameModel& model, const ControlPair& controls,
                           const SheetEnsemble& ensemble) {
  return estimate_mean(path_costs(player, model, controls, simulate_states(model, controls, ensemble)));
}

double hamiltonian(int player, GridPoint z, double y, double u1, double u2, double p, double q,
                   const Field& L, const GameModel& model) {
  const GridSpec& g = L.grid();
  g.require(z);
  const double t = g.t(z.i), x = g.x(z.j);
  Field a(g);
  for (int i = 0; i <= g.nt(); ++i) {
    for (int j = 0; j <= g.nx(); ++j) a(i, j) = model.drift(g.t(i), g.x(j), y, u1, u2);
  }
  return eval(model.players[player].running, t, x, y, u1, u2) + model.drift(t, x, y, u1, u2) * p +
         eval(model.diffusion, t, x, y, u1, u2) * q + star(L, a, z, g.corner());
}

LSolution solve_L(int player, const GameModel& model, const Field& y, const Field& u1, const Field& u2,
                  const Field& p, const LSolveOptions& options) {
  const GridSpec& g = y.grid();
  const PlayerCost& pc = model.players[player];
  Field base(g, 0.0, false);
  Field ay(g, 0.0, false);
  bool coupled = false;
  for (int i = 0; i <= g.nt(); ++i) {
    for (int j = 0; j <= g.nx(); ++j) {
      const double t = g.t(i), x = g.x(j);
      ay(i, j) = eval(model.drift_dy, t, x, y(i, j), u1(i, j), u2(i, j));
      base(i, j) = -(eval(pc.running_dy, t, x, y(i, j), u1(i, j), u2(i, j)) + ay(i, j) * p(i, j));
      coupled = coupled || ay(i, j) != 0.0;
    }
  }
  LSolution sol{base, 0.0, 0};
  if (!coupled) return sol;

  auto residual_of = [&](const Field& L, Field* next) {
    const Field s = star_frozen(L, model.drift_dy, model, y, u1, u2);
    double r = 0.0;
    for (std::size_t k = 0; k < L.values().size(); ++k) {
      const double target = base.values()[k] - s.values()[k];
      r = std::max(r, std::abs(L.values()[k] - target));
      if (next != nullptr) {
        next->values()[k] = (1.0 - options.damping) * L.values()[k] + options.damping * target;
      }
    }
    return r;
  };
  Field next(g, 0.0, false);
  for (int it = 1; it <= options.max_iter; ++it) {
    const double r = residual_of(sol.L, &next);
    sol.residual = r;
    sol.iterations = it;
    if (!std::isfinite(r)) throw ConvergenceError("solve_L: iteration diverged", r);
    if (r <= options.tol * std::max(1.0, sup_abs(sol.L))) return sol;
    std::swap(sol.L, next);
  }
  sol.residual = residual_of(sol.L, nullptr);
  if (sol.residual <= options.tol * std::max(1.0, sup_abs(sol.L))) return sol;
  std::ostringstream os;
  os << "solve_L: no convergence after " << options.max_iter << " iterations (residual " << sol.residual << ")";
  throw ConvergenceError(os.str(), sol.residual);
}

const char* to_string(AdjointForm f) {
  return f == AdjointForm::kIntegrated ? "integrated" : "quadrant";
}

namespace {

AdjointState integrated_adjoint(int player, const GameModel& model, const ControlPair& controls,
                                const std::vector<StatePath>& states, const ConditionalExpectation& ce,
                                const AdjointOptions& options) {
  const std::size_t N = states.size();
  const GridSpec& g = states.front().y.grid();
  const PlayerCost& pc = model.players[player];
  const double dA = g.cell_area();
  const std::vector<Field> ys = state_fields(states);

  AdjointState st;
  st.player = player;
  st.form = AdjointForm::kIntegrated;
  st.p.assign(N, Field(g));
  st.L.assign(N, Field(g, 0.0, false));
  std::vector<Field> zero_p(N, Field(g));
  bool coupled = false;
  parallel_for(N, [&](std::size_t k) {
    const auto& s = states[k];
    st.L[k] = solve_L(player, model, s.y, on_path(controls.u1, s.path), on_path(controls.u2, s.path),
                      zero_p[k], options.l_options)
                  .L;
  });
  for (const auto& s : states) {
    const Field& u1 = on_path(controls.u1, s.path);
    const Field& u2 = on_path(controls.u2, s.path);
    for (int i = 0; i <= g.nt() && !coupled; ++i) {
      for (int j = 0; j <= g.nx(); ++j) {
        if (eval(model.drift_dy, g.t(i), g.x(j), s.y(i, j), u1(i, j), u2(i, j)) != 0.0) {
          coupled = true;
          break;
        }
      }
    }
    if (coupled) break;
  }

  std::vector<double> target(N);
  for (int it = 1; it <= options.max_iter; ++it) {
    // p(z) = E[g' + Σ_all L dA | F_z] - Σ_{R_z} L dA
    for (std::size_t k = 0; k < N; ++k) {
      const Field& L = st.L[k];
      double s = 0.0;
      for (int i = 0; i < g.nt(); ++i) {
        for (int j = 0; j < g.nx(); ++j) s += L(i, j);
      }
      target[k] = (pc.terminal_dy ? pc.terminal_dy(states[k].y(g.corner())) : 0.0) + s * dA;
    }
    CondField cf = ce.field(target, &ys);
    st.method = cf.method;
    st.warnings = std::move(cf.warnings);
    parallel_for(N, [&](std::size_t k) {
      const Field& L = st.L[k];
      Field& p = st.p[k];
      Field inside(g, 0.0);
      for (int i = 1; i <= g.nt(); ++i) {
        for (int j = 1; j <= g.nx(); ++j) {
          inside(i, j) = inside(i - 1, j) + inside(i, j - 1) - inside(i - 1, j - 1) + L(i - 1, j - 1) * dA;
        }
      }
      for (std::size_t q = 0; q < p.values().size(); ++q) {
        p.values()[q] = cf.fields[k].values()[q] - inside.values()[q];
      }
      p(g.corner()) = pc.terminal_dy ? pc.terminal_dy(states[k].y(g.corner())) : 0.0;
    });
    st.iterations = it;
    if (!coupled) break;

    std::vector<double> change(N, 0.0), resid(N, 0.0);
    parallel_for(N, [&](std::size_t k) {
      const auto& s = states[k];
      LSolution ls = solve_L(player, model, s.y, on_path(controls.u1, s.path), on_path(controls.u2, s.path),
                             st.p[k], options.l_options);
      for (std::size_t q = 0; q < ls.L.values().size(); ++q) {
        change[k] = std::max(change[k], std::abs(ls.L.values()[q] - st.L[k].values()[q]));
      }
      resid[k] = ls.residual;
      st.L[k] = std::move(ls.L);
    });
    st.L_residual = *std::max_element(resid.begin(), resid.end());
    const double ch = *std::max_element(change.begin(), change.end());
    double scale = 1.0;
    for (const auto& L : st.L) scale = std::max(scale, sup_abs(L));
    if (!std::isfinite(ch)) throw ConvergenceError("solve_adjoint_linear: p/L iteration diverged", ch);
    if (ch <= options.tol * scale) return st;
    if (it == options.max_iter) {
      throw ConvergenceError("solve_adjoint_linear: p/L iteration did not converge", ch);
    }
  }
  return st;
}

AdjointState quadrant_adjoint(int player, const GameModel& model, const ControlPair& controls,
                              const std::vector<StatePath>& states, const ConditionalExpectation& ce) {
  const std::size_t N = states.size();
  const GridSpec& g = states.front().y.grid();
  const PlayerCost& pc = model.players[player];
  const double dA = g.cell_area();
  const std::vector<Field> ys = state_fields(states);
  const int nt = g.nt(), nx = g.nx();

  AdjointState st;
  st.player = player;
  st.form = AdjointForm::kQuadrant;
  st.p.assign(N, Field(g));
  st.L.assign(N, Field(g, 0.0, false));
  // U(i, j) = Σ_{cells c.i >= i, c.j >= j} (f_y + α_y λ)(c) dA, per path.
  std::vector<Field> U(N, Field(g, 0.0, false));
  std::vector<double> gp(N), target(N);
  for (std::size_t k = 0; k < N; ++k) gp[k] = pc.terminal_dy ? pc.terminal_dy(states[k].y(g.corner())) : 0.0;
  for (int i = nt; i >= 0; --i) {
    for (int j = nx; j >= 0; --j) {
      for (std::size_t k = 0; k < N; ++k) {
        target[k] = gp[k] + ((i < nt && j < nx) ? U[k](i + 1, j + 1) : 0.0);
      }
      const CondValues cv = ce.at(target, {i, j}, &ys);
      st.method = std::max(st.method, cv.method);
      if (!cv.warning.empty()) st.warnings.push_back(cv.warning);
      for (std::size_t k = 0; k < N; ++k) {
        st.p[k](i, j) = cv.values[k];
        if (i < nt && j < nx) {
          const auto& s = states[k];
          const double t = g.t(i), x = g.x(j), y = s.y(i, j);
          const double u1 = on_path(controls.u1, s.path)(i, j), u2 = on_path(controls.u2, s.path)(i, j);
          const double hy = eval(pc.running_dy, t, x, y, u1, u2) + eval(model.drift_dy, t, x, y, u1, u2) * cv.values[k];
          U[k](i, j) = hy * dA + U[k](i + 1, j) + U[k](i, j + 1) - U[k](i + 1, j + 1);
        }
      }
    }
  }
  st.iterations = 1;
  return st;
}

}  // namespace

AdjointState solve_adjoint_linear(int player, const GameModel& model, const ControlPair& controls,
                                  const std::vector<StatePath>& states, const ConditionalExpectation& ce,
                                  const AdjointOptions& options) {
  if (states.empty()) throw UsageError("solve_adjoint_linear: no states");
  require_supported(player, model, controls, states);
  if (options.form == AdjointForm::kQuadrant) return quadrant_adjoint(player, model, controls, states, ce);
  return integrated_adjoint(player, model, controls, states, ce, options);
}

Field hamiltonian_gradient(int player, const GameModel& model, const ControlPair& controls,
                           const StatePath& state, const AdjointState& adjoint) {
  const GridSpec& g = state.y.grid();
  const std::size_t k = adjoint.p.size() == 1 ? 0 : state.path;
  const Field& u1 = on_path(controls.u1, state.path);
  const Field& u2 = on_path(controls.u2, state.path);
  const Field& p = adjoint.p[k];
  const auto& fdu = running_du(model.players[player], player);
  const auto& adu = model.drift_du(player);
  Field grad(g, 0.0, true);
  Field s(g, 0.0, false);
  if (adjoint.form == AdjointForm::kIntegrated) s = star_frozen(adjoint.L[k], adu, model, state.y, u1, u2);
  const double sign = static_cast<double>(static_cast<int>(model.star_coupling));
  for (int i = 0; i <= g.nt(); ++i) {
    for (int j = 0; j <= g.nx(); ++j) {
      const double t = g.t(i), x = g.x(j), y = state.y(i, j);
      grad(i, j) = eval(fdu, t, x, y, u1(i, j), u2(i, j)) + eval(adu, t, x, y, u1(i, j), u2(i, j)) * p(i, j) +
                   sign * s(i, j);
    }
  }
  return grad;
}

Field simulate_G(int player, const GameModel& model, const StatePath& state, const Field& u1, const Field& u2,
                 const Field& v, const SheetEnsemble& ensemble, std::size_t path) {
  if (!v.adapted()) throw ContractViolation("simulate_G: direction must be adapted");
  const GridSpec& g = state.y.grid();
  const auto& adu = model.drift_du(player);
  const auto& bdu = model.diffusion_du(player);
  const double dA = g.cell_area();
  Field G(g, 0.0, true);
  for (int i = 0; i < g.nt(); ++i) {
    for (int j = 0; j < g.nx(); ++j) {
      const double t = g.t(i), x = g.x(j), y = state.y(i, j), a1 = u1(i, j), a2 = u2(i, j);
      const double drift = eval(model.drift_dy, t, x, y, a1, a2) * G(i, j) + eval(adu, t, x, y, a1, a2) * v(i, j);
      const double diff =
          eval(model.diffusion_dy, t, x, y, a1, a2) * G(i, j) + eval(bdu, t, x, y, a1, a2) * v(i, j);
      G(i + 1, j + 1) = G(i + 1, j) + G(i, j + 1) - G(i, j) + drift * dA + diff * ensemble.increment(path, i, j);
    }
  }
  return G;
}

namespace {

PathControls shifted(const PathControls& u, const PathControls& v, double eps, const ControlSet& set) {
  const std::size_t n = std::max(u.size(), v.size());
  PathControls out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Field f = on_path(u, k);
    const Field& d = on_path(v, k);
    for (std::size_t q = 0; q < f.values().size(); ++q) {
      f.values()[q] = std::clamp(f.values()[q] + eps * d.values()[q], set.lo, set.hi);
    }
    f.set_adapted(on_path(u, k).adapted() && d.adapted());
    out.push_back(std::move(f));
  }
  return out;
}

double max_abs_control(const PathControls& u) {
  double m = 0.0;
  for (const auto& f : u) m = std::max(m, sup_abs(f));
  return m;
}

}  // namespace

GateauxReport gateaux_J(int player, const GameModel& model, const ControlPair& controls, const PathControls& v,
                        const SheetEnsemble& ensemble, const GateauxOptions& options) {
  const std::size_t N = ensemble.n_paths();
  GateauxReport rep;
  rep.epsilon = options.rel_epsilon * std::max(1.0, max_abs_control(controls[player]));
  const ControlSet free_set;
  ControlPair plus = controls, minus = controls;
  plus[player] = shifted(controls[player], v, rep.epsilon, free_set);
  minus[player] = shifted(controls[player], v, -rep.epsilon, free_set);
  const auto jp = path_costs(player, model, plus, simulate_states(model, plus, ensemble));
  const auto jm = path_costs(player, model, minus, simulate_states(model, minus, ensemble));

  const auto states = simulate_states(model, controls, ensemble);
  const ConditionalExpectation ce(ensemble);
  AdjointOptions ao;
  ao.form = options.form;
  const AdjointState adj = solve_adjoint_linear(player, model, controls, states, ce, ao);
  const GridSpec& g = ensemble.grid();
  std::vector<double> fd(N), ham(N), diff(N);
  parallel_for(N, [&](std::size_t k) {
    const Field grad = hamiltonian_gradient(player, model, controls, states[k], adj);
    const Field& d = on_path(v, k);
    double s = 0.0;
    for (int i = 0; i < g.nt(); ++i) {
      for (int j = 0; j < g.nx(); ++j) s += grad(i, j) * d(i, j);
    }
    ham[k] = s * g.cell_area();
    fd[k] = (jp[k] - jm[k]) / (2.0 * rep.epsilon);
    diff[k] = fd[k] - ham[k];
  });
  rep.finite_difference = estimate_mean(fd);
  rep.hamiltonian_form = estimate_mean(ham);
  rep.difference = estimate_mean(diff);
  const double scale =
      std::max({1.0, std::abs(rep.finite_difference.mean), std::abs(rep.hamiltonian_form.mean)});
  rep.tolerance = std::max(options.rel_tol * scale, 3.0 * rep.difference.stderr_);
  rep.agree = std::abs(rep.difference.mean) <= rep.tolerance;
  return rep;
}

PerturbationSet default_perturbations(const GridSpec& grid) {
  const int nt = grid.nt(), nx = grid.nx();
  auto id = [&](int i, int j) {
    std::ostringstream os;
    os << "rect_t" << grid.t(i) << "_x" << grid.x(j);
    return os.str();
  };
  PerturbationSet set;
  set.directions.push_back({"constant", {0, 0}});
  for (GridPoint c : {GridPoint{nt / 4, nx / 4}, GridPoint{nt / 2, nx / 2}, GridPoint{nt / 4, (3 * nx) / 4},
                      GridPoint{(3 * nt) / 4, nx / 4}}) {
    set.directions.push_back({id(c.i, c.j), c});
  }
  set.magnitudes = {0.05, 0.2, 0.5};
  return set;
}

Field direction_field(const GridSpec& grid, const Direction& d, double eta) {
  Field f(grid, 0.0, true);
  for (int i = d.corner.i; i <= grid.nt(); ++i) {
    for (int j = d.corner.j; j <= grid.nx(); ++j) f(i, j) = eta;
  }
  return f;
}

NashReport check_nash(const GameModel& model, const ControlPair& controls, const PerturbationSet& set,
                      const SheetEnsemble& ensemble) {
  const GridSpec& g = ensemble.grid();
  const auto states = simulate_states(model, controls, ensemble);
  const std::array<std::vector<double>, 2> base{path_costs(0, model, controls, states),
                                                path_costs(1, model, controls, states)};
  NashReport rep;
  for (int player = 0; player < 2; ++player) {
    for (const auto& d : set.directions) {
      const PathControls dir{direction_field(g, d, 1.0)};
      for (double m : set.magnitudes) {
        for (double sgn : {1.0, -1.0}) {
          ControlPair pert = controls;
          pert[player] = shifted(controls[player], dir, sgn * m, model.controls[player]);
          const auto cost = path_costs(player, model, pert, simulate_states(model, pert, ensemble));
          std::vector<double> dj(cost.size());
          for (std::size_t k = 0; k < dj.size(); ++k) dj[k] = cost[k] - base[player][k];
          NashRow row;
          row.player = player;
          row.direction_id = d.id;
          row.epsilon = sgn * m;
          row.delta_J = estimate_mean(dj);
          row.pass = row.delta_J.mean >= -(3.0 * row.delta_J.stderr_ + set.tolerance);
          if (!row.pass) ++rep.failures;
          rep.rows.push_back(std::move(row));
        }
      }
    }
  }
  rep.pass = rep.failures == 0;
  return rep;
}

StationarityReport check_stationarity(const GameModel& model, const ControlPair& controls,
                                      const PerturbationSet& set, const SheetEnsemble& ensemble,
                                      const AdjointOptions& options, double tol) {
  const GridSpec& g = ensemble.grid();
  const std::size_t N = ensemble.n_paths();
  const auto states = simulate_states(model, controls, ensemble);
  const ConditionalExpectation ce(ensemble);
  StationarityReport rep;
  rep.pass = true;
  for (int player = 0; player < 2; ++player) {
    const AdjointState adj = solve_adjoint_linear(player, model, controls, states, ce, options);
    std::vector<Field> grads(N);
    parallel_for(N, [&](std::size_t k) { grads[k] = hamiltonian_gradient(player, model, controls, states[k], adj); });
    for (const auto& d : set.directions) {
      std::vector<double> v(N);
      for (std::size_t k = 0; k < N; ++k) {
        double s = 0.0;
        for (int i = d.corner.i; i < g.nt(); ++i) {
          for (int j = d.corner.j; j < g.nx(); ++j) s += grads[k](i, j);
        }
        v[k] = s * g.cell_area();
      }
      StationarityRow row;
      row.player = player;
      row.direction_id = d.id;
      row.gradient = estimate_mean(v);
      row.pass = std::abs(row.gradient.mean) <= 3.0 * row.gradient.stderr_ + tol;
      rep.pass = rep.pass && row.pass;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

}  // namespace sheetgame
