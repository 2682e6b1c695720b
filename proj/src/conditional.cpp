#include "sheetgame/conditional.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sheetgame/errors.hpp"
#include "sheetgame/parallel.hpp"

namespace sheetgame {

const char* to_string(CondMethod m) {
  switch (m) {
    case CondMethod::kConstant: return "constant";
    case CondMethod::kTrivial: return "trivial";
    case CondMethod::kAffine: return "affine";
    case CondMethod::kRegression: return "regression";
  }
  return "?";
}

struct ConditionalExpectation::Qr {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr;
  Eigen::MatrixXd design;
};

ConditionalExpectation::ConditionalExpectation(const SheetEnsemble& ensemble, CondOptions options)
    : ensemble_(&ensemble), options_(options) {}
ConditionalExpectation::~ConditionalExpectation() = default;
ConditionalExpectation::ConditionalExpectation(ConditionalExpectation&&) noexcept = default;
ConditionalExpectation& ConditionalExpectation::operator=(ConditionalExpectation&&) noexcept = default;

namespace {

bool has_no_spread(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo <= 1e-14 * std::max(1.0, std::max(std::abs(*lo), std::abs(*hi)));
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

const ConditionalExpectation::Qr* ConditionalExpectation::qr() const {
  if (qr_tried_) return qr_.get();
  qr_tried_ = true;
  const GridSpec& g = ensemble_->grid();
  const std::size_t K = g.num_cells();
  const std::size_t N = ensemble_->n_paths();
  if (K > options_.max_affine_cells || N < 2 * (K + 1)) return nullptr;
  auto q = std::make_unique<Qr>();
  q->design.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(K + 1));
  for (std::size_t p = 0; p < N; ++p) {
    const auto inc = ensemble_->path_increments(p);
    q->design(static_cast<Eigen::Index>(p), 0) = 1.0;
    for (std::size_t c = 0; c < K; ++c) {
      q->design(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c + 1)) = inc[c];
    }
  }
  q->qr.compute(q->design);
  qr_ = std::move(q);
  return qr_.get();
}

std::vector<double> ConditionalExpectation::affine_fit(std::span<const double> target) const {
  if (target.size() != ensemble_->n_paths()) throw UsageError("affine_fit: target size mismatch");
  const Qr* q = qr();
  if (q == nullptr) return {};
  const Eigen::Map<const Eigen::VectorXd> y(target.data(), static_cast<Eigen::Index>(target.size()));
  const Eigen::VectorXd w = q->qr.solve(y);
  const Eigen::VectorXd r = q->design * w - y;
  const double spread = (y.array() - y.mean()).matrix().norm();
  if (!(r.norm() <= options_.affine_tol * std::max(spread, 1e-300))) return {};
  return {w.data(), w.data() + w.size()};
}

double ConditionalExpectation::project_affine(std::span<const double> weights, GridPoint z,
                                              std::size_t path) const {
  const GridSpec& g = ensemble_->grid();
  double s = weights[0];
  for (int i = 0; i < z.i; ++i) {
    for (int j = 0; j < z.j; ++j) s += weights[g.cell_index(i, j) + 1] * ensemble_->increment(path, i, j);
  }
  return s;
}

CondValues ConditionalExpectation::regress(std::span<const double> target, GridPoint z,
                                           const std::vector<Field>* states) const {
  const std::size_t N = target.size();
  std::vector<double> b(N), y;
  for (std::size_t p = 0; p < N; ++p) b[p] = ensemble_->value(p, z);
  if (states != nullptr) {
    y.resize(N);
    for (std::size_t p = 0; p < N; ++p) y[p] = (*states)[p](z);
  }
  // Candidate bases from richest to poorest.
  std::vector<std::vector<int>> bases;
  if (states != nullptr) bases = {{0, 1, 2, 3, 4}, {0, 1, 3}, {0, 1, 2}, {0, 1}, {0}};
  else bases = {{0, 1, 2}, {0, 1}, {0}};
  auto column = [&](int k, std::size_t p) {
    switch (k) {
      case 1: return b[p];
      case 2: return b[p] * b[p];
      case 3: return y[p];
      case 4: return y[p] * y[p];
      default: return 1.0;
    }
  };
  const Eigen::Map<const Eigen::VectorXd> t(target.data(), static_cast<Eigen::Index>(N));
  CondValues out;
  out.method = CondMethod::kRegression;
  for (std::size_t bi = 0; bi < bases.size(); ++bi) {
    const auto& basis = bases[bi];
    Eigen::MatrixXd A(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t k = 0; k < basis.size(); ++k) {
        A(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = column(basis[k], p);
      }
    }
    // Scale columns so the rank test is not fooled by magnitude.
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (Eigen::Index k = 0; k < scale.size(); ++k) {
      if (scale(k) == 0.0) scale(k) = 1.0;
    }
    const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    qr.setThreshold(1e-10);
    if (qr.rank() < As.cols() && bi + 1 < bases.size()) {
      if (out.warning.empty()) {
        out.warning = "rank-deficient regression basis at (" + std::to_string(z.i) + ", " +
                      std::to_string(z.j) + "); using a smaller basis";
      }
      continue;
    }
    const Eigen::VectorXd w = qr.solve(t);
    const Eigen::VectorXd fit = As * w;
    out.values.assign(fit.data(), fit.data() + fit.size());
    return out;
  }
  out.values.assign(N, mean_of(target));
  return out;
}

CondValues ConditionalExpectation::at(std::span<const double> target, GridPoint z,
                                      const std::vector<Field>* states) const {
  const GridSpec& g = ensemble_->grid();
  const std::size_t N = ensemble_->n_paths();
  if (target.size() != N) throw UsageError("conditional expectation: target size mismatch");
  g.require(z);
  CondValues out;
  if (has_no_spread(target)) {
    out.values.assign(target.begin(), target.end());
    out.method = CondMethod::kConstant;
    return out;
  }
  if (z == g.corner()) {
    out.values.assign(target.begin(), target.end());
    out.method = CondMethod::kTrivial;
    return out;
  }
  const auto w = affine_fit(target);
  if (!w.empty()) {
    out.values.resize(N);
    for (std::size_t p = 0; p < N; ++p) out.values[p] = project_affine(w, z, p);
    out.method = CondMethod::kAffine;
    return out;
  }
  if (z.i == 0 || z.j == 0) {
    out.values.assign(N, mean_of(target));
    out.method = CondMethod::kTrivial;
    return out;
  }
  return regress(target, z, states);
}

CondField ConditionalExpectation::field(std::span<const double> target,
                                        const std::vector<Field>* states) const {
  const GridSpec& g = ensemble_->grid();
  const std::size_t N = ensemble_->n_paths();
  if (target.size() != N) throw UsageError("conditional expectation: target size mismatch");
  CondField out;
  out.fields.assign(N, Field(g, 0.0, true));
  if (has_no_spread(target)) {
    for (std::size_t p = 0; p < N; ++p) std::fill(out.fields[p].values().begin(), out.fields[p].values().end(), target[p]);
    out.method = CondMethod::kConstant;
    return out;
  }
  const auto w = affine_fit(target);
  if (!w.empty()) {
    out.method = CondMethod::kAffine;
    parallel_for(N, [&](std::size_t p) {
      Field& f = out.fields[p];
      // f(i, j) = w0 + Σ_{a<i, b<j} w_(a,b) dB_(a,b) by 2-D prefix sums.
      for (int i = 0; i <= g.nt(); ++i) {
        for (int j = 0; j <= g.nx(); ++j) {
          if (i == 0 || j == 0) {
            f(i, j) = w[0];
            continue;
          }
          f(i, j) = f(i - 1, j) + f(i, j - 1) - f(i - 1, j - 1) +
                    w[g.cell_index(i - 1, j - 1) + 1] * ensemble_->increment(p, i - 1, j - 1);
        }
      }
      f(g.corner()) = target[p];
    });
    return out;
  }
  out.method = CondMethod::kRegression;
  for (int i = 0; i <= g.nt(); ++i) {
    for (int j = 0; j <= g.nx(); ++j) {
      const GridPoint z{i, j};
      CondValues v;
      if (z == g.corner()) v.values.assign(target.begin(), target.end());
      else if (i == 0 || j == 0) v.values.assign(N, mean_of(target));
      else v = regress(target, z, states);
      if (!v.warning.empty()) out.warnings.push_back(v.warning);
      for (std::size_t p = 0; p < N; ++p) out.fields[p](i, j) = v.values[p];
    }
  }
  return out;
}

}  // namespace sheetgame
