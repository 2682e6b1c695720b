#pragma once

#include <functional>
#include <vector>

#include "sheetgame/grid.hpp"

namespace sheetgame {

/// Real values at every lattice point for a single path (or a
/// deterministic function).
///
/// `adapted` declares that the value at z depends only on the sheet inside
/// R_z. Stochastic integrators refuse fields without the flag. Integrands
/// are read at the lower-left corner of each cell.
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, double fill = 0.0, bool adapted = true)
      : grid_(grid), values_(grid.num_points(), fill), adapted_(adapted) {}

  static Field constant(const GridSpec& grid, double v) { return Field(grid, v, true); }
  /// Samples a deterministic function f(t, x) at every grid point.
  static Field from_function(const GridSpec& grid, const std::function<double(double, double)>& f);

  const GridSpec& grid() const noexcept { return grid_; }
  bool adapted() const noexcept { return adapted_; }
  void set_adapted(bool a) noexcept { adapted_ = a; }

  double operator()(int i, int j) const noexcept { return values_[grid_.point_index(i, j)]; }
  double& operator()(int i, int j) noexcept { return values_[grid_.point_index(i, j)]; }
  double operator()(GridPoint z) const noexcept { return (*this)(z.i, z.j); }
  double& operator()(GridPoint z) noexcept { return (*this)(z.i, z.j); }
  /// Value used for the cell with lower-left corner c.
  double at_cell(CellIndex c) const noexcept { return (*this)(c.i, c.j); }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

 private:
  GridSpec grid_;
  std::vector<double> values_;
  bool adapted_ = true;
};

/// Per-path collection of fields sharing one grid.
using PathFields = std::vector<Field>;

/// Deterministic kernel over ordered cell pairs (c, c'), stored densely.
/// Entry (c, c') is the kernel at the lower-left corners of c and c'.
class PairField {
 public:
  PairField() = default;
  explicit PairField(const GridSpec& grid) : grid_(grid), values_(grid.num_cells() * grid.num_cells(), 0.0) {}

  /// Samples psi(t, x, t', x') at lower-left corners.
  static PairField from_function(const GridSpec& grid,
                                 const std::function<double(double, double, double, double)>& psi);
  static PairField constant(const GridSpec& grid, double v);

  const GridSpec& grid() const noexcept { return grid_; }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(CellIndex c, CellIndex cp) const noexcept {
    return values_[grid_.cell_index(c) * grid_.num_cells() + grid_.cell_index(cp)];
  }
  double& operator()(CellIndex c, CellIndex cp) noexcept {
    return values_[grid_.cell_index(c) * grid_.num_cells() + grid_.cell_index(cp)];
  }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

}  // namespace sheetgame
