#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sheetgame/ito_process.hpp"
#include "sheetgame/stats.hpp"

namespace sheetgame {

/// Scalar C^4 function with its first four derivatives.
struct SmoothFn {
  std::string name;
  std::array<std::function<double(double)>, 5> d;  // f, f', f'', f''', f''''

  double operator()(double y) const { return d[0](y); }
  double deriv(int k, double y) const { return d[k](y); }

  static SmoothFn identity();
  /// Σ c_k y^k with exact derivatives.
  static SmoothFn polynomial(std::vector<double> coeffs, std::string name = "polynomial");
  static SmoothFn power(int n);
  /// exp(k y).
  static SmoothFn exponential(double k);
  static SmoothFn sine();
};

/// Compares each supplied derivative with a central difference at `samples`
/// points in [-range, range]; throws ContractViolation if any relative error
/// exceeds 1e-6 (step 1e-4 * max(1, |y|)).
void check_derivatives(const SmoothFn& f, int samples = 16, double range = 2.0);

/// Per-path value of every term group of the plane Itô formula at z.
struct ItoTerms {
  double lhs = 0.0;          // f(Y(z))
  double initial = 0.0;      // f(Y0)
  double lebesgue = 0.0;     // ∫ f'(Y) α dζ
  double ito = 0.0;          // ∫ f'(Y) β B(dζ)                         (zero mean)
  double quadratic = 0.0;    // ½ ∫ f''(Y) β² dζ
  double double_ito = 0.0;   // ∬ {f'' u ũ + f' ψ} B(dζ) B(dζ')          (zero mean)
  double mixed_1 = 0.0;      // ∬ {f''(u α(ζ) + ψ ũ) + ½ f''' u² ũ} dζ B(dζ')   (zero mean)
  double mixed_2 = 0.0;      // ∬ {f''(ũ α(ζ') + ψ u) + ½ f''' u ũ²} B(dζ) dζ'  (zero mean)
  double wedge_drift = 0.0;  // ∬ I(ζ∧̄ζ'){...} dζ dζ'

  double deterministic_rhs() const { return initial + lebesgue + quadratic + wedge_drift; }
  double full_rhs() const { return deterministic_rhs() + ito + double_ito + mixed_1 + mixed_2; }
};

/// Evaluates all term groups on one path. Y(ζ ∨ ζ') is read at the grid
/// point (t_{i'}, x_j) for the ∧̄-ordered pair (i, j), (i', j'); the auxiliary
/// integrals u, ũ run over the part of the pairing rectangle strictly below
/// that point.
ItoTerms ito_terms(const SmoothFn& f, const ProcessSpec& spec, GridPoint z,
                   const SheetEnsemble& ensemble, std::size_t path);

enum class CheckMode { kExpectation, kPathwise };

struct TermGroup {
  std::string name;
  MeanEstimate estimate;
};

struct ItoReport {
  CheckMode mode = CheckMode::kExpectation;
  MeanEstimate lhs;
  double rhs_expectation = 0.0;  // mean of the deterministic groups
  double rhs_full = 0.0;         // mean including zero-mean groups
  std::vector<TermGroup> groups;
  MeanEstimate gap;              // mean of lhs - rhs per path for the chosen mode
  double max_pathwise_error = 0.0;
  double allowance = 0.0;
  bool pass = false;
};

struct ItoCheckOptions {
  CheckMode mode = CheckMode::kExpectation;
  double allowance = 0.0;            // discretization allowance added to 3 * stderr
  double pathwise_rel_tol = 1e-10;   // pathwise mode: max |lhs - rhs| / max(1, |lhs|)
};

/// Verifies the plane Itô formula at z over the ensemble.
ItoReport ito_formula_check(const SmoothFn& f, const ProcessSpec& spec, GridPoint z,
                            const SheetEnsemble& ensemble, const ItoCheckOptions& options = {});

/// Sums increments over 2x2 blocks: the coarse sheet driven by the same noise.
/// Requires even nt and nx.
SheetEnsemble coarsen(const SheetEnsemble& fine);

/// Discretization allowance for the expectation-mode Itô check: twice the
/// change in the mean gap between `fine` and its coarsened grid (same paths).
/// `make_spec` builds the process on a given grid (ψ is grid bound); `coarse_z`
/// is a point of the coarse grid.
double ito_grid_allowance(const SmoothFn& f,
                          const std::function<ProcessSpec(const GridSpec&)>& make_spec,
                          GridPoint coarse_z, const SheetEnsemble& fine);

/// Integration-by-parts check for two processes on the same sheet. Groups:
/// initial, drift_cross (Y1 α2 + Y2 α1), diffusion_cross (β1 β2),
/// wedge_drift, wedge_psi. Passes when |mean gap| <= 3 stderr +
/// quad_tol * max(1, |lhs|).
ItoReport ibp_check(const ProcessSpec& p1, const ProcessSpec& p2, GridPoint z,
                    const SheetEnsemble& ensemble, double quad_tol = 1e-9);

/// First positive root of J0(2 sqrt(t)).
double bessel_root_r0();

struct WellPosedness {
  bool well_posed = false;
  double margin = 0.0;  // min(sqrt(r0) - K1 |z0|, 1 - K2^2 |z0|)
  double r0 = 0.0;
};

/// Sufficient conditions K1 |z0| < sqrt(r0) and K2^2 |z0| < 1 for a
/// Lipschitz backward equation on a rectangle of area |z0|.
WellPosedness bspde_wellposedness(double K1, double K2, double z0_area);

}  // namespace sheetgame
