#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>

namespace sheetgame {

/// Coefficient of the controlled dynamics: (t, x, y, u1, u2) -> value.
using ControlledCoefficient = std::function<double(double, double, double, double, double)>;
/// Terminal cost or its derivative: y -> value.
using TerminalFn = std::function<double(double)>;

/// Closed interval of admissible control values.
struct ControlSet {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double u) const noexcept { return u >= lo && u <= hi; }
};

/// Running and terminal cost of one player with their partial derivatives.
struct PlayerCost {
  ControlledCoefficient running;
  ControlledCoefficient running_dy;
  ControlledCoefficient running_du1;
  ControlledCoefficient running_du2;
  TerminalFn terminal;
  TerminalFn terminal_dy;
};

/// How (L_i ⋆ ∂α/∂u_i) enters the first-order condition ∂H_i/∂u_i.
/// kDerived follows from differentiating H_i; kDisplayed flips the sign,
/// matching the closed-form control formulas of the two-region example.
enum class StarCoupling { kDerived = 1, kDisplayed = -1 };

/// Two-player controlled sheet dynamics
///   Y(z) = y0 + ∫_{R_z} α(ζ, Y, u1, u2) dζ + ∫_{R_z} β(ζ, Y, u1, u2) B(dζ)
/// with costs J_i = E[∫ f_i dζ + g_i(Y(Z))].
struct GameModel {
  std::string name;
  double y0 = 0.0;
  double T = 1.0;
  double X = 1.0;

  ControlledCoefficient drift;
  ControlledCoefficient drift_dy;
  ControlledCoefficient drift_du1;
  ControlledCoefficient drift_du2;
  ControlledCoefficient diffusion;
  ControlledCoefficient diffusion_dy;
  ControlledCoefficient diffusion_du1;
  ControlledCoefficient diffusion_du2;

  std::array<PlayerCost, 2> players;
  std::array<ControlSet, 2> controls;
  StarCoupling star_coupling = StarCoupling::kDisplayed;
  /// Declares ∂α/∂y, ∂α/∂u1, ∂α/∂u2 constant, which lets ⋆ terms use prefix
  /// sums instead of re-evaluating the drift over each strip.
  bool drift_partials_constant = false;

  const ControlledCoefficient& drift_du(int player) const { return player == 0 ? drift_du1 : drift_du2; }
  const ControlledCoefficient& diffusion_du(int player) const {
    return player == 0 ? diffusion_du1 : diffusion_du2;
  }
};

/// Central finite-difference spot check of every supplied partial derivative
/// at `samples` pseudo-random arguments. Returns the worst relative error.
double max_derivative_mismatch(const GameModel& model, int samples = 32, double step = 1e-5);

}  // namespace sheetgame
