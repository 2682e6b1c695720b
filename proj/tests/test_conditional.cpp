#include <cmath>

#include "doctest.h"
#include "sheetgame/conditional.hpp"
#include "sheetgame/errors.hpp"

using namespace sheetgame;

TEST_CASE("affine targets are projected exactly") {
  const GridSpec g(1.0, 1.0, 4, 4);
  const SheetEnsemble e = sample_sheet(g, 10, 200);
  std::vector<double> target(e.n_paths());
  for (std::size_t p = 0; p < e.n_paths(); ++p) target[p] = 2.0 + 3.0 * e.value(p, g.corner());
  const ConditionalExpectation ce(e);
  const CondValues v = ce.at(target, {2, 3});
  CHECK(v.method == CondMethod::kAffine);
  for (std::size_t p = 0; p < e.n_paths(); ++p) CHECK(v.values[p] == doctest::Approx(2.0 + 3.0 * e.value(p, 2, 3)));
  const CondField f = ce.field(target);
  for (std::size_t p = 0; p < e.n_paths(); p += 37)
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; j <= 4; ++j) CHECK(f.fields[p](i, j) == doctest::Approx(2.0 + 3.0 * e.value(p, i, j)).epsilon(1e-9));
}

TEST_CASE("square of the terminal sheet by regression") {
  const GridSpec g(1.0, 1.0, 4, 4);
  const SheetEnsemble e = sample_sheet(g, 11, 6000);
  std::vector<double> target(e.n_paths());
  for (std::size_t p = 0; p < e.n_paths(); ++p) target[p] = e.value(p, g.corner()) * e.value(p, g.corner());
  const ConditionalExpectation ce(e);
  const GridPoint z{2, 2};
  const CondValues v = ce.at(target, z);
  CHECK(v.method == CondMethod::kRegression);
  double err = 0.0;
  for (std::size_t p = 0; p < e.n_paths(); ++p) {
    const double b = e.value(p, z);
    err = std::max(err, std::abs(v.values[p] - (b * b + 1.0 - 0.25)) / (1.0 + b * b));
  }
  CHECK(err < 0.1);
}

TEST_CASE("trivial cases") {
  const GridSpec g(1.0, 1.0, 3, 3);
  const SheetEnsemble e = sample_sheet(g, 12, 50);
  const ConditionalExpectation ce(e);
  std::vector<double> constant(50, 4.5);
  const CondValues c = ce.at(constant, {1, 1});
  CHECK(c.method == CondMethod::kConstant);
  CHECK(c.values[7] == 4.5);
  std::vector<double> target(50);
  double mean = 0.0;
  for (std::size_t p = 0; p < 50; ++p) {
    target[p] = std::exp(e.value(p, g.corner()));
    mean += target[p] / 50.0;
  }
  const CondValues axis = ce.at(target, {0, 2});
  CHECK(axis.method == CondMethod::kTrivial);
  CHECK(axis.values[3] == doctest::Approx(mean));
  const CondValues corner = ce.at(target, g.corner());
  CHECK(corner.values[9] == target[9]);
  CHECK_THROWS_AS(ce.at(std::vector<double>(3, 1.0), {1, 1}), UsageError);
  CHECK_THROWS_AS(ce.at(target, {4, 1}), UsageError);
}
