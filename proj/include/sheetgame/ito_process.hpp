#pragma once

#include <functional>

#include "sheetgame/field.hpp"
#include "sheetgame/model.hpp"
#include "sheetgame/sheet.hpp"

namespace sheetgame {

/// Two-parameter Itô process
///   Y(z) = Y0 + ∫ α dζ + ∫ β B(dζ) + ∬ ψ B(dζ) B(dζ')
/// with α, β functions of (t, x, y) and a deterministic pair kernel ψ
/// (an empty PairField means ψ = 0).
struct ProcessSpec {
  double y0 = 0.0;
  std::function<double(double, double, double)> alpha = [](double, double, double) { return 0.0; };
  std::function<double(double, double, double)> beta = [](double, double, double) { return 0.0; };
  PairField psi;
};

/// Forward solution on one path.
struct StatePath {
  Field y;
  std::size_t path = 0;
};

/// Lower-left corner sweep of the process on one path. Cells are visited in
/// increasing (i, j); coefficients read the already computed corner value.
/// Throws NumericalError (with the cell) on non-finite values.
StatePath simulate_process(const ProcessSpec& spec, const SheetEnsemble& ensemble, std::size_t path);

/// Increment of the double Itô sum attributable to cell (p, q): all ∧̄-ordered
/// distinct pairs whose componentwise maximum is that cell.
double double_integral_increment(const PairField& psi, const SheetEnsemble& ensemble,
                                 std::size_t path, int p, int q);

/// Euler–Itô sweep of the controlled state with Y(0, x) = Y(t, 0) = y0.
/// Throws ContractViolation on non-adapted controls.
StatePath simulate_controlled_state(const GameModel& model, const Field& u1, const Field& u2,
                                    const SheetEnsemble& ensemble, std::size_t path);

}  // namespace sheetgame
