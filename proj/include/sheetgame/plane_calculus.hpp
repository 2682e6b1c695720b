#pragma once

#include <cstddef>
#include <utility>

#include "sheetgame/field.hpp"
#include "sheetgame/sheet.hpp"

namespace sheetgame {

/// I(a ∧̄ b): 1 iff a is no later in time and no lower in space than b
/// (t <= t' and x >= x').
inline bool indicator_wedge(PlanePoint a, PlanePoint b) noexcept {
  return a.t <= b.t && a.x >= b.x;
}
/// Cell-level version with non-strict index comparisons (i <= i', j >= j').
inline bool indicator_wedge(CellIndex a, CellIndex b) noexcept {
  return a.i <= b.i && a.j >= b.j;
}

/// Sum over cells inside R_z of phi(lower-left) * dt * dx.
double lebesgue_integral(const Field& phi, GridPoint z);
double lebesgue_integral(const Field& phi, PlanePoint z);

/// Itô sum over cells inside R_z of phi(lower-left) * dB_cell.
/// Throws ContractViolation when phi is not flagged adapted.
double ito_integral(const Field& phi, const SheetEnsemble& ensemble, std::size_t path, GridPoint z);

/// Double Itô sum over ordered cell pairs (c, c') in R_z with c != c' and
/// I(c ∧̄ c') = 1 of psi(c, c') dB_c dB_c'.
double double_ito_integral(const PairField& psi, const SheetEnsemble& ensemble, std::size_t path,
                           GridPoint z);

/// Mixed integrals over the same pairing: first = Σ psi dζ dB(ζ'),
/// second = Σ psi dB(ζ) dζ'.
std::pair<double, double> mixed_integrals(const PairField& psi, const SheetEnsemble& ensemble,
                                          std::size_t path, GridPoint z);

/// (h ⋆ k)(z) = ∫_0^x ∫_t^T {h(z) k(s,a) + h(s,a) k(z)} ds da with T taken
/// from `horizon`; cells of [t, T) x [0, x) are read at lower-left corners.
/// Throws UsageError unless z <= horizon componentwise.
double star(const Field& h, const Field& k, GridPoint z, GridPoint horizon);

/// (h ⋆ k) at every grid point of R_horizon (zero elsewhere), via prefix sums.
Field star_field(const Field& h, const Field& k, GridPoint horizon);

/// Both sides of
///   ∬ I(ζ ∧̄ ζ') {a1(ζ') a2(ζ) + a1(ζ) a2(ζ')} dζ dζ' = ∫_{R_z} (a1 ⋆ a2)(ζ) dζ
/// for fields taken piecewise constant on cells. The left side is a brute
/// force pair sum with the exact pair measure of the indicator; the right
/// side integrates the ⋆ operator (horizon z) exactly over each cell.
std::pair<double, double> star_double_identity(const Field& a1, const Field& a2, GridPoint z);

/// E[B(ζ) | F_z] = B(ζ ∧ z) on one path.
double conditional_projection(GridPoint zeta, GridPoint z, const SheetEnsemble& ensemble,
                              std::size_t path);

/// Drift-drift quadrature of the ∧̄ double integral consistent with the
/// corner Itô scheme:
///   Σ_{c != c', c ∧̄ c'} {a1(c') a2(c) + a1(c) a2(c')} dA^2 + Σ_c a1(c) a2(c) dA^2
/// (the diagonal carries half of the symmetric integrand). With lower-left
/// Lebesgue sums this makes the discrete product rule exact.
double wedge_quadrature(const Field& a1, const Field& a2, GridPoint z);

/// Σ over ∧̄-ordered distinct cell pairs in R_z of psi1 * psi2 * dA^2.
double wedge_pair_sum(const PairField& psi1, const PairField& psi2, GridPoint z);

}  // namespace sheetgame
