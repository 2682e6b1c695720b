#pragma once

#include <cstddef>
#include <string>

namespace sheetgame {

/// Index of a lattice point (i along time, j along space).
struct GridPoint {
  int i = 0;
  int j = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Index of a lattice cell, identified by its lower-left corner.
struct CellIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Continuous time-space point (t, x).
struct PlanePoint {
  double t = 0.0;
  double x = 0.0;
};

/// Rectangular lattice over [0,T] x [0,X] with nt x nx cells.
///
/// Grid points z_{i,j} = (i dt, j dx) for 0 <= i <= nt, 0 <= j <= nx.
class GridSpec {
 public:
  GridSpec() = default;
  /// Throws ConfigError on nonpositive horizons or cell counts.
  GridSpec(double T, double X, int nt, int nx);

  double T() const noexcept { return T_; }
  double X() const noexcept { return X_; }
  int nt() const noexcept { return nt_; }
  int nx() const noexcept { return nx_; }
  double dt() const noexcept { return T_ / nt_; }
  double dx() const noexcept { return X_ / nx_; }
  double cell_area() const noexcept { return dt() * dx(); }

  double t(int i) const noexcept { return i * dt(); }
  double x(int j) const noexcept { return j * dx(); }

  std::size_t num_points() const noexcept {
    return static_cast<std::size_t>(nt_ + 1) * static_cast<std::size_t>(nx_ + 1);
  }
  std::size_t num_cells() const noexcept {
    return static_cast<std::size_t>(nt_) * static_cast<std::size_t>(nx_);
  }
  std::size_t point_index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nx_ + 1) +
           static_cast<std::size_t>(j);
  }
  std::size_t point_index(GridPoint z) const noexcept { return point_index(z.i, z.j); }
  std::size_t cell_index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(j);
  }
  std::size_t cell_index(CellIndex c) const noexcept { return cell_index(c.i, c.j); }

  GridPoint corner() const noexcept { return {nt_, nx_}; }
  bool contains(GridPoint z) const noexcept {
    return z.i >= 0 && z.j >= 0 && z.i <= nt_ && z.j <= nx_;
  }
  /// Throws UsageError if z is outside the lattice.
  void require(GridPoint z) const;

  /// Maps a continuous point onto the lattice. Throws UsageError when the
  /// point is not a grid point (relative tolerance 1e-9 of the step).
  GridPoint locate(double t, double x) const;
  GridPoint locate(PlanePoint p) const { return locate(p.t, p.x); }

  PlanePoint point(GridPoint z) const noexcept { return {t(z.i), x(z.j)}; }

  /// Same grid with both cell counts doubled.
  GridSpec refined() const { return GridSpec(T_, X_, 2 * nt_, 2 * nx_); }

  std::string describe() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  double T_ = 1.0;
  double X_ = 1.0;
  int nt_ = 1;
  int nx_ = 1;
};

}  // namespace sheetgame
