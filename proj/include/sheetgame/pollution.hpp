#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sheetgame/game.hpp"

namespace sheetgame {

/// Emission-control game: dY = (u1 + u2) dζ + σ B(dζ),
/// J_i = E[∫ a_i u_i^2 dζ + c_i Y(Z)^2].
struct Example1Params {
  double a1 = 1.0, a2 = 1.0;
  double c1 = 1.0, c2 = 1.0;
  double sigma = 0.0;
  double y = 1.0;
  double T = 1.0, X = 1.0;

  /// Throws ConfigError unless a_i > 0, c_i > 0, σ >= 0 and T, X > 0.
  void validate() const;
};

/// Two-region game: dY = (-α1 u1 - α2 u2 + S) dζ + σ B(dζ),
/// J_i = E[∫ ½ Y^2 + ½ β_i u_i^2 dζ].
struct Example2Params {
  double alpha1 = 1.0, alpha2 = 1.0;
  double beta1 = 1.0, beta2 = 1.0;
  std::function<double(double, double)> sigma = [](double, double) { return 0.0; };
  std::function<double(double, double)> source = [](double, double) { return 1.0; };
  double y = 0.0;
  double T = 1.0, X = 1.0;
  StarCoupling star_coupling = StarCoupling::kDisplayed;

  /// Throws ConfigError unless α_i > 0, β_i != 0 and T, X > 0.
  void validate() const;
};

struct Example1Reduction {
  double alpha = 0.0;  // 1 + c2 a1 / (c1 a2)
  double beta = 0.0;   // a1 + c2^2 a1^2 / (c1^2 a2)
  double ratio = 0.0;  // û2 / û1 = c2 a1 / (c1 a2)
};

Example1Reduction example1_reduction(const Example1Params& params);

/// Optimal constant control of the reduced single-agent problem
/// min β u^2 TX + (c1 + c2)(y + α u TX)^2 (deterministic case).
double example1_reduced_closed_form(const Example1Params& params);

/// Cost of the reduced problem at a constant control u1 (deterministic).
double example1_reduced_cost(const Example1Params& params, double u1);

GameModel example1_model(const Example1Params& params);
GameModel example2_model(const Example2Params& params);

struct PicardOptions {
  double damping = 0.5;  // halved whenever the residual grows
  int max_iter = 200;
  double tol = -1.0;     // < 0: 1e-8 deterministic, 1e-4 * scale stochastic
  double min_damping = 1.0 / 1024.0;
};

/// How the Example 1 control update is derived.
///  kReduction: û1 = -(α/2β) p̂ with p̂ = E[2 (c1 + c2) Y(Z) | F_z], û2 = ratio û1.
///  kPlayerwise:     û_i = -p_i / (2 a_i) with p_i = E[2 c_i Y(Z) | F_z].
enum class Example1Formulation { kReduction, kPlayerwise };

const char* to_string(Example1Formulation f);

struct EquilibriumSolution {
  EquilibriumSolution(std::string label_, SheetEnsemble ensemble_)
      : label(std::move(label_)), ensemble(std::move(ensemble_)) {}

  std::string label;
  SheetEnsemble ensemble;
  ControlPair controls;
  std::vector<StatePath> states;
  std::array<std::vector<Field>, 2> p;
  std::array<std::vector<Field>, 2> L;
  std::array<MeanEstimate, 2> J;
  int iterations = 0;
  std::vector<double> residuals;
  bool converged = false;
  double final_damping = 0.0;
  CondMethod method = CondMethod::kConstant;
  std::vector<std::string> warnings;
};

/// Picard iteration for Example 1. With σ = 0 a single path is simulated.
/// Throws ConvergenceError (with the last residual) after max_iter.
EquilibriumSolution solve_example1(const Example1Params& params, const GridSpec& grid, std::uint64_t seed,
                                   std::size_t n_paths,
                                   Example1Formulation formulation = Example1Formulation::kReduction,
                                   const PicardOptions& options = {});

/// Picard iteration for Example 2 using L_i = -Y, the integrated adjoint and
///   û_i = α_i (p_i + s (L_i ⋆ 1)) / β_i,  s = star coupling sign,
/// where the future part of (L_i ⋆ 1) is replaced by its conditional
/// expectation on F_z.
EquilibriumSolution solve_example2(const Example2Params& params, const GridSpec& grid, std::uint64_t seed,
                                   std::size_t n_paths, const PicardOptions& options = {});

struct SymmetricReport {
  bool symmetric_params = false;
  double max_deviation = 0.0;  // max |û1 - û2| over paths and grid points
  GridPoint worst_point;
  std::size_t worst_path = 0;
  bool pass = false;           // symmetric params and deviation <= 1e-8
  std::optional<double> superposition_error;  // σ = 0: |u(2y) - (2 u(y) - u(0))|
  std::array<MeanEstimate, 2> J;
  double mean_terminal_state = 0.0;
};

SymmetricReport symmetric_case_report(const Example2Params& params, const GridSpec& grid, std::uint64_t seed,
                                      std::size_t n_paths, const PicardOptions& options = {});

}  // namespace sheetgame
