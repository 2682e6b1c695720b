#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sheetgame/grid.hpp"

namespace sheetgame {

/// Seeded collection of Brownian-sheet sample paths on a lattice.
///
/// Each path stores the per-cell increments dB (variance dt*dx) and the
/// corner values B(t_i, x_j), which are the exact prefix sums of the
/// increments over the lower-left sub-rectangle. Paths are identified by a
/// global index so that a large ensemble can be generated in batches
/// (first_path > 0) and still reproduce the same draws.
///
/// Immutable after construction.
class SheetEnsemble {
 public:
  SheetEnsemble(GridSpec grid, std::uint64_t seed, std::size_t n_paths,
                std::size_t first_path, std::vector<double> increments,
                std::vector<double> corners);

  const GridSpec& grid() const noexcept { return grid_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t first_path() const noexcept { return first_path_; }

  /// Increment of cell (i, j) on a path; unchecked.
  double increment(std::size_t path, int i, int j) const noexcept {
    return increments_[path * grid_.num_cells() + grid_.cell_index(i, j)];
  }
  /// B at grid point (i, j) on a path; unchecked.
  double value(std::size_t path, int i, int j) const noexcept {
    return corners_[path * grid_.num_points() + grid_.point_index(i, j)];
  }
  double value(std::size_t path, GridPoint z) const noexcept { return value(path, z.i, z.j); }

  std::span<const double> path_increments(std::size_t path) const noexcept {
    return {increments_.data() + path * grid_.num_cells(), grid_.num_cells()};
  }
  std::span<const double> path_values(std::size_t path) const noexcept {
    return {corners_.data() + path * grid_.num_points(), grid_.num_points()};
  }

 private:
  GridSpec grid_;
  std::uint64_t seed_;
  std::size_t n_paths_;
  std::size_t first_path_;
  std::vector<double> increments_;
  std::vector<double> corners_;
};

/// Draws n_paths sheet paths with global indices first_path, first_path+1, ...
///
/// Each increment is keyed by (seed, global path, cell i, cell j) through a
/// counter-based generator, so the result does not depend on the worker
/// count or on how paths are batched.
SheetEnsemble sample_sheet(const GridSpec& grid, std::uint64_t seed, std::size_t n_paths,
                           std::size_t first_path = 0, int workers = 0);

/// Checked lookup of B(z) on a path. Throws UsageError on bad indices.
double sheet_value(const SheetEnsemble& ensemble, std::size_t path, GridPoint z);

}  // namespace sheetgame
