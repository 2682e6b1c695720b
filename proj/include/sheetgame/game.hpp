#pragma once

#include <array>
#include <string>
#include <vector>

#include "sheetgame/conditional.hpp"
#include "sheetgame/ito_process.hpp"
#include "sheetgame/model.hpp"
#include "sheetgame/stats.hpp"

namespace sheetgame {

/// Control fields of one player, one per path. A single field is shared by
/// every path (deterministic control).
using PathControls = std::vector<Field>;

struct ControlPair {
  PathControls u1;
  PathControls u2;

  const PathControls& operator[](int player) const { return player == 0 ? u1 : u2; }
  PathControls& operator[](int player) { return player == 0 ? u1 : u2; }
};

/// Field of a path-indexed collection, broadcasting a single entry.
inline const Field& on_path(const PathControls& c, std::size_t path) {
  return c.size() == 1 ? c[0] : c[path];
}

/// Constant deterministic control pair.
ControlPair constant_controls(const GridSpec& grid, double u1, double u2);

/// Forward states on every path of the ensemble.
std::vector<StatePath> simulate_states(const GameModel& model, const ControlPair& controls,
                                       const SheetEnsemble& ensemble);

/// Per-path cost Σ f_i(lower-left) dt dx + g_i(Y(Z)) for one player.
std::vector<double> path_costs(int player, const GameModel& model, const ControlPair& controls,
                               const std::vector<StatePath>& states);

/// J_i estimate over the ensemble.
MeanEstimate expected_cost(int player, const GameModel& model, const ControlPair& controls,
                           const SheetEnsemble& ensemble);

/// H_i = f_i + α p + β q + (L ⋆ α)(z), with α in the ⋆ term evaluated over
/// the strip at the given (y, u1, u2). The horizon is the corner of L's grid.
/// Throws UsageError when z is off the grid.
double hamiltonian(int player, GridPoint z, double y, double u1, double u2, double p, double q,
                   const Field& L, const GameModel& model);

struct LSolveOptions {
  double damping = 0.5;
  double tol = 1e-10;
  int max_iter = 1000;
};

struct LSolution {
  Field L;
  double residual = 0.0;  // sup |L + ∂H/∂y|
  int iterations = 0;
};

/// Solves L(z) = -∂H_i/∂y(z) = -[f_y + α_y p + (L ⋆ α_y)(z)] on one path.
/// Closed form when α_y vanishes; otherwise damped fixed point. Throws
/// ConvergenceError (with the residual) when the iteration stalls.
LSolution solve_L(int player, const GameModel& model, const Field& y, const Field& u1,
                  const Field& u2, const Field& p, const LSolveOptions& options = {});

/// How the first adjoint p_i is assembled.
///  kIntegrated: p(z) = E[g'(Y(Z)) - ∫_{R_Z \ R_z} ∂H/∂y dζ | F_z] with L = -∂H/∂y.
///  kQuadrant:   λ(z) = E[g'(Y(Z)) + ∫_{[t,T]x[x,X]} (f_y + α_y λ) dζ | F_z] and no
///               ⋆ term; the exact discrete adjoint of the forward scheme.
enum class AdjointForm { kIntegrated, kQuadrant };

const char* to_string(AdjointForm f);

struct AdjointOptions {
  AdjointForm form = AdjointForm::kIntegrated;
  LSolveOptions l_options;
  double tol = 1e-10;  // outer p/L loop when α_y != 0
  int max_iter = 500;
};

/// Adjoints of one player along a solution. q and r are not extracted.
struct AdjointState {
  int player = 0;
  AdjointForm form = AdjointForm::kIntegrated;
  std::vector<Field> p;
  std::vector<Field> q;  // empty
  PairField r;           // empty
  std::vector<Field> L;  // zero fields for kQuadrant
  double L_residual = 0.0;
  int iterations = 0;
  CondMethod method = CondMethod::kConstant;
  std::vector<std::string> warnings;
};

/// Adjoint solve for models whose ∂H_i/∂y does not involve q (∂β/∂y = 0)
/// and whose controls do not enter the diffusion. Throws UnsupportedModel
/// otherwise.
AdjointState solve_adjoint_linear(int player, const GameModel& model, const ControlPair& controls,
                                  const std::vector<StatePath>& states,
                                  const ConditionalExpectation& ce,
                                  const AdjointOptions& options = {});

/// ∂H_i/∂u_i at every grid point of one path:
/// f_{u_i} + α_{u_i} p + sign (L ⋆ α_{u_i}); the ⋆ term is dropped for kQuadrant.
Field hamiltonian_gradient(int player, const GameModel& model, const ControlPair& controls,
                           const StatePath& state, const AdjointState& adjoint);

/// Linear variational equation for a perturbation v of player i's control.
Field simulate_G(int player, const GameModel& model, const StatePath& state, const Field& u1,
                 const Field& u2, const Field& v, const SheetEnsemble& ensemble, std::size_t path);

struct GateauxOptions {
  AdjointForm form = AdjointForm::kIntegrated;
  double rel_epsilon = 1e-5;  // ε = rel_epsilon * max(1, max |u_i|)
  double rel_tol = 1e-4;
};

struct GateauxReport {
  double epsilon = 0.0;
  MeanEstimate finite_difference;
  MeanEstimate hamiltonian_form;
  MeanEstimate difference;  // per-path difference, common random numbers
  double tolerance = 0.0;   // max(rel_tol * scale, 3 stderr)
  bool agree = false;
};

/// Directional derivative of J_i along v (player i only), by central
/// finite differences and by E[Σ ∂H_i/∂u_i v dt dx].
GateauxReport gateaux_J(int player, const GameModel& model, const ControlPair& controls,
                        const PathControls& v, const SheetEnsemble& ensemble,
                        const GateauxOptions& options = {});

/// Direction η 1_{[t0,T]x[x0,X]}; a zero corner gives the constant direction.
struct Direction {
  std::string id;
  GridPoint corner;
};

struct PerturbationSet {
  std::vector<Direction> directions;
  std::vector<double> magnitudes;
  double tolerance = 1e-8;
};

/// Constant direction plus four upper-right rectangles, magnitudes
/// {0.05, 0.2, 0.5}; both signs are always tried.
PerturbationSet default_perturbations(const GridSpec& grid);

Field direction_field(const GridSpec& grid, const Direction& d, double eta);

struct NashRow {
  int player = 0;
  std::string direction_id;
  double epsilon = 0.0;
  MeanEstimate delta_J;
  bool pass = false;
};

struct NashReport {
  std::vector<NashRow> rows;
  bool pass = false;
  std::size_t failures = 0;
};

/// Unilateral perturbation check: every ΔJ_i must be >= -(3 stderr + tol).
/// Perturbed controls are clipped to the control sets.
NashReport check_nash(const GameModel& model, const ControlPair& controls, const PerturbationSet& set,
                      const SheetEnsemble& ensemble);

struct StationarityRow {
  int player = 0;
  std::string direction_id;
  MeanEstimate gradient;  // E[Σ ∂H_i/∂u_i 1_rect dt dx]
  bool pass = false;
};

struct StationarityReport {
  std::vector<StationarityRow> rows;
  bool pass = false;
};

/// Hamiltonian-gradient stationarity against every direction of the set:
/// |mean| <= 3 stderr + tol * max(1, scale).
StationarityReport check_stationarity(const GameModel& model, const ControlPair& controls,
                                      const PerturbationSet& set, const SheetEnsemble& ensemble,
                                      const AdjointOptions& options = {}, double tol = 1e-8);

}  // namespace sheetgame
