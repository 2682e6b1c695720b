#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sheetgame {

/// Sample mean and standard error of the mean.
struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Pairwise summation; order fixed by the input layout only.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

inline MeanEstimate estimate_mean(std::span<const double> v) {
  MeanEstimate e;
  e.n = v.size();
  if (v.empty()) return e;
  e.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) return e;
  std::vector<double> sq(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double d = v[k] - e.mean;
    sq[k] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
  e.stderr_ = std::sqrt(var / static_cast<double>(v.size()));
  return e;
}

}  // namespace sheetgame
