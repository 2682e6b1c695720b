#include "sheetgame/grid.hpp"

#include <cmath>
#include <sstream>

#include "sheetgame/errors.hpp"

namespace sheetgame {

GridSpec::GridSpec(double T, double X, int nt, int nx) : T_(T), X_(X), nt_(nt), nx_(nx) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ConfigError("grid: time horizon T must be positive, got " + std::to_string(T));
  }
  if (!(X > 0.0) || !std::isfinite(X)) {
    throw ConfigError("grid: space horizon X must be positive, got " + std::to_string(X));
  }
  if (nt < 1) throw ConfigError("grid: nt must be >= 1, got " + std::to_string(nt));
  if (nx < 1) throw ConfigError("grid: nx must be >= 1, got " + std::to_string(nx));
}

void GridSpec::require(GridPoint z) const {
  if (!contains(z)) {
    throw UsageError("grid point (" + std::to_string(z.i) + ", " + std::to_string(z.j) +
                     ") outside " + describe());
  }
}

GridPoint GridSpec::locate(double t, double x) const {
  const double fi = t / dt();
  const double fj = x / dx();
  const double ri = std::round(fi);
  const double rj = std::round(fj);
  if (std::abs(fi - ri) > 1e-9 * std::max(1.0, std::abs(fi)) ||
      std::abs(fj - rj) > 1e-9 * std::max(1.0, std::abs(fj))) {
    std::ostringstream os;
    os << "point (" << t << ", " << x << ") is not on " << describe();
    throw UsageError(os.str());
  }
  GridPoint z{static_cast<int>(ri), static_cast<int>(rj)};
  require(z);
  return z;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "grid [0," << T_ << "]x[0," << X_ << "] with " << nt_ << "x" << nx_ << " cells";
  return os.str();
}

}  // namespace sheetgame
