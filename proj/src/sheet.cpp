#include "sheetgame/sheet.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdlib>
#include <string>

#include "sheetgame/errors.hpp"
#include "sheetgame/parallel.hpp"
#include "sheetgame/philox.hpp"

namespace sheetgame {

namespace {
int g_default_workers = 0;
}

int default_workers() {
  if (g_default_workers > 0) return g_default_workers;
  if (const char* env = std::getenv("SHEETGAME_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

void set_default_workers(int workers) { g_default_workers = workers; }

double keyed_standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint32_t i,
                             std::uint32_t j) noexcept {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr{i, j, static_cast<std::uint32_t>(stream),
                                static_cast<std::uint32_t>(stream >> 32)};
  const auto out = Philox4x32::generate(ctr, key);
  const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, open_unit_interval(bits));
}

SheetEnsemble::SheetEnsemble(GridSpec grid, std::uint64_t seed, std::size_t n_paths,
                             std::size_t first_path, std::vector<double> increments,
                             std::vector<double> corners)
    : grid_(grid),
      seed_(seed),
      n_paths_(n_paths),
      first_path_(first_path),
      increments_(std::move(increments)),
      corners_(std::move(corners)) {}

SheetEnsemble sample_sheet(const GridSpec& grid, std::uint64_t seed, std::size_t n_paths,
                           std::size_t first_path, int workers) {
  // Re-validate: a default-constructed GridSpec bypasses the checking ctor.
  const GridSpec checked(grid.T(), grid.X(), grid.nt(), grid.nx());
  if (n_paths < 1) throw ConfigError("sample_sheet: n_paths must be >= 1");

  const std::size_t ncell = checked.num_cells();
  const std::size_t npt = checked.num_points();
  const int nt = checked.nt();
  const int nx = checked.nx();
  const double scale = std::sqrt(checked.cell_area());

  std::vector<double> inc(n_paths * ncell);
  std::vector<double> val(n_paths * npt, 0.0);

  parallel_for(
      n_paths,
      [&](std::size_t p) {
        const std::uint64_t stream = first_path + p;
        double* dB = inc.data() + p * ncell;
        double* B = val.data() + p * npt;
        for (int i = 0; i < nt; ++i) {
          for (int j = 0; j < nx; ++j) {
            dB[checked.cell_index(i, j)] =
                scale * keyed_standard_normal(seed, stream, static_cast<std::uint32_t>(i),
                                              static_cast<std::uint32_t>(j));
          }
        }
        // Boundary rows stay exactly zero; interior by inclusion-exclusion.
        for (int i = 0; i < nt; ++i) {
          for (int j = 0; j < nx; ++j) {
            B[checked.point_index(i + 1, j + 1)] =
                B[checked.point_index(i + 1, j)] + B[checked.point_index(i, j + 1)] -
                B[checked.point_index(i, j)] + dB[checked.cell_index(i, j)];
          }
        }
      },
      workers);

  return SheetEnsemble(checked, seed, n_paths, first_path, std::move(inc), std::move(val));
}

double sheet_value(const SheetEnsemble& ensemble, std::size_t path, GridPoint z) {
  if (path >= ensemble.n_paths()) {
    throw UsageError("sheet_value: path " + std::to_string(path) + " out of range (" +
                     std::to_string(ensemble.n_paths()) + " paths)");
  }
  ensemble.grid().require(z);
  return ensemble.value(path, z);
}

}  // namespace sheetgame
