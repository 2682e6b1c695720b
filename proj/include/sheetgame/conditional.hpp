#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sheetgame/field.hpp"
#include "sheetgame/sheet.hpp"

namespace sheetgame {

enum class CondMethod {
  kConstant,    // target has no spread across paths
  kTrivial,     // z on an axis (mean) or z = corner (identity)
  kAffine,      // target affine in the cell increments; exact projection
  kRegression,  // least squares on {1, B(z), B(z)^2, Y(z), Y(z)^2}
};

const char* to_string(CondMethod m);

struct CondOptions {
  std::size_t max_affine_cells = 1100;  // skip the affine route above this many cells
  double affine_tol = 1e-8;             // relative residual accepted as "affine"
};

struct CondValues {
  std::vector<double> values;
  CondMethod method = CondMethod::kConstant;
  std::string warning;
};

struct CondField {
  std::vector<Field> fields;  // one adapted field per path
  CondMethod method = CondMethod::kConstant;
  std::vector<std::string> warnings;
};

/// Estimator of E[target | F_z] across the paths of an ensemble.
///
/// A target affine in the cell increments is projected exactly by keeping
/// the increments inside R_z. Otherwise the target is regressed per z on
/// {1, B(z), B(z)^2} plus {Y(z), Y(z)^2} when per-path states are supplied;
/// a rank-deficient basis is shrunk and a warning recorded.
///
/// The QR factorization of the increment design is built on first use.
/// Not safe for concurrent use by several threads.
class ConditionalExpectation {
 public:
  explicit ConditionalExpectation(const SheetEnsemble& ensemble, CondOptions options = {});
  ~ConditionalExpectation();
  ConditionalExpectation(ConditionalExpectation&&) noexcept;
  ConditionalExpectation& operator=(ConditionalExpectation&&) noexcept;

  const SheetEnsemble& ensemble() const noexcept { return *ensemble_; }

  /// E[target | F_z] per path. Throws UsageError on size mismatch or z off grid.
  CondValues at(std::span<const double> target, GridPoint z,
                const std::vector<Field>* states = nullptr) const;

  /// E[target | F_z] at every grid point, one field per path.
  CondField field(std::span<const double> target, const std::vector<Field>* states = nullptr) const;

  /// Affine fit w0 + Σ w_c dB_c of a target, or empty when the target is
  /// not affine within tolerance (or the affine route is unavailable).
  std::vector<double> affine_fit(std::span<const double> target) const;

  /// Projection of a fitted affine target onto F_z for one path.
  double project_affine(std::span<const double> weights, GridPoint z, std::size_t path) const;

 private:
  struct Qr;
  const SheetEnsemble* ensemble_;
  CondOptions options_;
  mutable std::unique_ptr<Qr> qr_;
  mutable bool qr_tried_ = false;

  const Qr* qr() const;
  CondValues regress(std::span<const double> target, GridPoint z,
                     const std::vector<Field>* states) const;
};

}  // namespace sheetgame
