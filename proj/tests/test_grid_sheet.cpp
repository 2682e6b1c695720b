#include <cmath>

#include "doctest.h"
#include "sheetgame/errors.hpp"
#include "sheetgame/philox.hpp"
#include "sheetgame/sheet.hpp"
#include "sheetgame/stats.hpp"

using namespace sheetgame;

TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("grid validation and lookup") {
  CHECK_THROWS_AS(GridSpec(0.0, 1.0, 4, 4), ConfigError);
  CHECK_THROWS_AS(GridSpec(1.0, -1.0, 4, 4), ConfigError);
  CHECK_THROWS_AS(GridSpec(1.0, 1.0, 0, 4), ConfigError);
  const GridSpec g(2.0, 1.0, 4, 8);
  CHECK(g.dt() == doctest::Approx(0.5));
  CHECK(g.dx() == doctest::Approx(0.125));
  const GridPoint z = g.locate(1.5, 0.25);
  CHECK(z.i == 3);
  CHECK(z.j == 2);
  CHECK_THROWS_AS(g.locate(0.3, 0.25), UsageError);
  CHECK_THROWS_AS(g.locate(2.5, 0.25), UsageError);
  CHECK_THROWS_AS(g.require({5, 0}), UsageError);
  CHECK(g.refined().nt() == 8);
}

TEST_CASE("sheet values are cumulative increments and vanish on the axes") {
  const GridSpec g(1.0, 1.0, 6, 5);
  const SheetEnsemble e = sample_sheet(g, 42, 3);
  for (std::size_t p = 0; p < 3; ++p) {
    for (int i = 0; i <= g.nt(); ++i) CHECK(e.value(p, i, 0) == 0.0);
    for (int j = 0; j <= g.nx(); ++j) CHECK(e.value(p, 0, j) == 0.0);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) acc += e.increment(p, i, j);
    CHECK(e.value(p, 4, 3) == doctest::Approx(acc).epsilon(1e-14));
  }
  CHECK_THROWS_AS(sheet_value(e, 3, {1, 1}), UsageError);
  CHECK_THROWS_AS(sheet_value(e, 0, {7, 1}), UsageError);
}

TEST_CASE("sampling is independent of workers and batching") {
  const GridSpec g(1.0, 2.0, 7, 9);
  const SheetEnsemble a = sample_sheet(g, 123, 40, 0, 1);
  const SheetEnsemble b = sample_sheet(g, 123, 40, 0, 4);
  const SheetEnsemble c = sample_sheet(g, 123, 15, 25, 3);
  for (std::size_t p = 0; p < 40; ++p)
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j) CHECK(a.increment(p, i, j) == b.increment(p, i, j));
  for (std::size_t p = 0; p < 15; ++p) CHECK(c.value(p, g.corner()) == a.value(p + 25, g.corner()));
  const SheetEnsemble d = sample_sheet(g, 124, 1);
  CHECK(d.increment(0, 0, 0) != a.increment(0, 0, 0));
}

TEST_CASE("increments have cell-area variance") {
  const GridSpec g(1.0, 0.5, 4, 4);
  const SheetEnsemble e = sample_sheet(g, 9, 20000);
  std::vector<double> sq(e.n_paths());
  for (std::size_t p = 0; p < e.n_paths(); ++p) sq[p] = e.increment(p, 2, 1) * e.increment(p, 2, 1);
  const MeanEstimate m = estimate_mean(sq);
  CHECK(std::abs(m.mean - g.cell_area()) < 4.0 * m.stderr_);
}

TEST_CASE("pairwise sum and mean estimate") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(pairwise_sum(v) == 15.0);
  const MeanEstimate m = estimate_mean(v);
  CHECK(m.mean == 3.0);
  CHECK(m.stderr_ == doctest::Approx(std::sqrt(2.5 / 5.0)));
}
