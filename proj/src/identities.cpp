#include "sheetgame/identities.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sheetgame/errors.hpp"
#include "sheetgame/parallel.hpp"
#include "sheetgame/plane_calculus.hpp"

namespace sheetgame {

SmoothFn SmoothFn::identity() {
  return polynomial({0.0, 1.0}, "identity");
}

SmoothFn SmoothFn::polynomial(std::vector<double> coeffs, std::string name) {
  SmoothFn f;
  f.name = std::move(name);
  std::vector<std::vector<double>> ders{std::move(coeffs)};
  for (int k = 1; k < 5; ++k) {
    const auto& prev = ders.back();
    std::vector<double> next;
    for (std::size_t n = 1; n < prev.size(); ++n) next.push_back(prev[n] * static_cast<double>(n));
    ders.push_back(std::move(next));
  }
  for (int k = 0; k < 5; ++k) {
    f.d[k] = [c = ders[k]](double y) {
      double s = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * y + *it;
      return s;
    };
  }
  return f;
}

SmoothFn SmoothFn::power(int n) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c.back() = 1.0;
  return polynomial(std::move(c), "y^" + std::to_string(n));
}

SmoothFn SmoothFn::exponential(double k) {
  SmoothFn f;
  f.name = "exp";
  for (int m = 0; m < 5; ++m) {
    f.d[m] = [k, m](double y) { return std::pow(k, m) * std::exp(k * y); };
  }
  return f;
}

SmoothFn SmoothFn::sine() {
  SmoothFn f;
  f.name = "sin";
  f.d[0] = [](double y) { return std::sin(y); };
  f.d[1] = [](double y) { return std::cos(y); };
  f.d[2] = [](double y) { return -std::sin(y); };
  f.d[3] = [](double y) { return -std::cos(y); };
  f.d[4] = [](double y) { return std::sin(y); };
  return f;
}

void check_derivatives(const SmoothFn& f, int samples, double range) {
  for (const auto& g : f.d) {
    if (!g) throw ContractViolation("SmoothFn " + f.name + ": missing derivative");
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pick(-range, range);
  for (int s = 0; s < samples; ++s) {
    const double y = pick(rng);
    const double h = 1e-4 * std::max(1.0, std::abs(y));
    for (int k = 1; k < 5; ++k) {
      const double fd = (f.d[k - 1](y + h) - f.d[k - 1](y - h)) / (2.0 * h);
      const double an = f.d[k](y);
      if (std::abs(fd - an) > 1e-6 * std::max(1.0, std::abs(an))) {
        std::ostringstream os;
        os << "SmoothFn " << f.name << ": derivative " << k << " inconsistent at y = " << y
           << " (analytic " << an << ", central difference " << fd << ")";
        throw ContractViolation(os.str());
      }
    }
  }
}

ItoTerms ito_terms(const SmoothFn& f, const ProcessSpec& spec, GridPoint z,
                   const SheetEnsemble& ensemble, std::size_t path) {
  const GridSpec& g = ensemble.grid();
  g.require(z);
  const StatePath sp = simulate_process(spec, ensemble, path);
  const Field& y = sp.y;
  const int I = z.i;
  const int J = z.j;
  const double dA = g.cell_area();

  // Derivatives at every lattice point of R_z, coefficients at every cell.
  const std::size_t np = g.num_points();
  std::array<std::vector<double>, 5> fd;
  for (auto& v : fd) v.assign(np, 0.0);
  for (int i = 0; i <= I; ++i) {
    for (int j = 0; j <= J; ++j) {
      const std::size_t k = g.point_index(i, j);
      for (int m = 0; m < 5; ++m) fd[m][k] = f.d[m](y(i, j));
    }
  }
  auto D = [&](int m, int i, int j) { return fd[m][g.point_index(i, j)]; };
  const std::size_t nc = g.num_cells();
  std::vector<double> al(nc, 0.0), be(nc, 0.0), dB(nc, 0.0);
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      const std::size_t c = g.cell_index(i, j);
      al[c] = spec.alpha(g.t(i), g.x(j), y(i, j));
      be[c] = spec.beta(g.t(i), g.x(j), y(i, j));
      dB[c] = ensemble.increment(path, i, j);
    }
  }

  ItoTerms r;
  r.lhs = D(0, I, J);
  r.initial = f.d[0](spec.y0);
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      const std::size_t c = g.cell_index(i, j);
      r.lebesgue += D(1, i, j) * al[c] * dA;
      r.ito += D(1, i, j) * be[c] * dB[c];
      r.quadratic += 0.5 * D(2, i, j) * be[c] * be[c] * dA;
    }
  }

  // Auxiliary integrals of ψ. For c' = (ip, jp): colsum[c'][j] is the sum over
  // cells (a, b) with a < ip, jp <= b < j of ψ((a,b), c') dB. For c = (i, j):
  // rowsum[c][ip] is the sum over cells (a, b) with i <= a < ip, b < j of
  // ψ(c, (a,b)) dB.
  const bool has_psi = !spec.psi.empty();
  const int W = J + 1;
  const int H = I + 1;
  std::vector<double> colsum, rowsum;
  if (has_psi) {
    colsum.assign(nc * W, 0.0);
    rowsum.assign(nc * H, 0.0);
    for (int ip = 0; ip < I; ++ip) {
      for (int jp = 0; jp < J; ++jp) {
        const std::size_t cp = g.cell_index(ip, jp);
        double acc = 0.0;
        for (int b = jp; b < J; ++b) {
          for (int a = 0; a < ip; ++a) acc += spec.psi({a, b}, {ip, jp}) * dB[g.cell_index(a, b)];
          colsum[cp * W + b + 1] = acc;
        }
      }
    }
    for (int i = 0; i < I; ++i) {
      for (int j = 0; j < J; ++j) {
        const std::size_t c = g.cell_index(i, j);
        double acc = 0.0;
        for (int a = i; a < I; ++a) {
          for (int b = 0; b < j; ++b) acc += spec.psi({i, j}, {a, b}) * dB[g.cell_index(a, b)];
          rowsum[c * H + a + 1] = acc;
        }
      }
    }
  }

  // Pairs c = (i, j), c' = (ip, jp) with i <= ip, j >= jp; Y(ζ ∨ ζ') at (ip, j).
  for (int ip = 0; ip < I; ++ip) {
    for (int jp = 0; jp < J; ++jp) {
      const std::size_t cp = g.cell_index(ip, jp);
      for (int i = 0; i <= ip; ++i) {
        for (int j = jp; j < J; ++j) {
          const std::size_t c = g.cell_index(i, j);
          const double f1 = D(1, ip, j);
          const double f2 = D(2, ip, j);
          const double f3 = D(3, ip, j);
          const double f4 = D(4, ip, j);
          if (c == cp) {
            const double b2 = be[c] * be[c];
            const double sym = f2 * al[c] * al[c] + f3 * al[c] * b2 + 0.25 * f4 * b2 * b2;
            r.wedge_drift += 0.5 * sym * dA * dA;
            continue;
          }
          const double psi = has_psi ? spec.psi({i, j}, {ip, jp}) : 0.0;
          const double u = be[cp] + (has_psi ? colsum[cp * W + j] : 0.0);
          const double ut = be[c] + (has_psi ? rowsum[c * H + ip] : 0.0);
          r.double_ito += (f2 * u * ut + f1 * psi) * dB[c] * dB[cp];
          r.mixed_1 += (f2 * (u * al[c] + psi * ut) + 0.5 * f3 * u * u * ut) * dA * dB[cp];
          r.mixed_2 += (f2 * (ut * al[cp] + psi * u) + 0.5 * f3 * u * ut * ut) * dB[c] * dA;
          r.wedge_drift += (f2 * (al[cp] * al[c] + 0.5 * psi * psi) + f3 * u * ut * psi +
                            0.5 * f3 * (al[cp] * ut * ut + al[c] * u * u) + 0.25 * f4 * u * u * ut * ut) *
                           dA * dA;
        }
      }
    }
  }
  return r;
}

namespace {

std::vector<ItoTerms> all_terms(const SmoothFn& f, const ProcessSpec& spec, GridPoint z,
                                const SheetEnsemble& ensemble) {
  std::vector<ItoTerms> terms(ensemble.n_paths());
  parallel_for(terms.size(), [&](std::size_t p) { terms[p] = ito_terms(f, spec, z, ensemble, p); });
  return terms;
}

template <class Get>
MeanEstimate column(const std::vector<ItoTerms>& terms, Get get) {
  std::vector<double> v(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) v[k] = get(terms[k]);
  return estimate_mean(v);
}

}  // namespace

ItoReport ito_formula_check(const SmoothFn& f, const ProcessSpec& spec, GridPoint z,
                            const SheetEnsemble& ensemble, const ItoCheckOptions& options) {
  check_derivatives(f);
  ensemble.grid().require(z);
  const auto terms = all_terms(f, spec, z, ensemble);

  ItoReport rep;
  rep.mode = options.mode;
  rep.allowance = options.allowance;
  rep.lhs = column(terms, [](const ItoTerms& t) { return t.lhs; });
  rep.groups = {
      {"initial", column(terms, [](const ItoTerms& t) { return t.initial; })},
      {"lebesgue", column(terms, [](const ItoTerms& t) { return t.lebesgue; })},
      {"ito", column(terms, [](const ItoTerms& t) { return t.ito; })},
      {"quadratic", column(terms, [](const ItoTerms& t) { return t.quadratic; })},
      {"double_ito", column(terms, [](const ItoTerms& t) { return t.double_ito; })},
      {"mixed_1", column(terms, [](const ItoTerms& t) { return t.mixed_1; })},
      {"mixed_2", column(terms, [](const ItoTerms& t) { return t.mixed_2; })},
      {"wedge_drift", column(terms, [](const ItoTerms& t) { return t.wedge_drift; })},
  };
  rep.rhs_expectation = column(terms, [](const ItoTerms& t) { return t.deterministic_rhs(); }).mean;
  rep.rhs_full = column(terms, [](const ItoTerms& t) { return t.full_rhs(); }).mean;

  const double scale = std::max(1.0, std::abs(rep.lhs.mean));
  if (options.mode == CheckMode::kPathwise) {
    rep.gap = column(terms, [](const ItoTerms& t) { return t.lhs - t.full_rhs(); });
    for (const auto& t : terms) {
      const double e = std::abs(t.lhs - t.full_rhs()) / std::max(1.0, std::abs(t.lhs));
      rep.max_pathwise_error = std::max(rep.max_pathwise_error, e);
    }
    rep.pass = rep.max_pathwise_error <= options.pathwise_rel_tol;
  } else {
    rep.gap = column(terms, [](const ItoTerms& t) { return t.lhs - t.deterministic_rhs(); });
    rep.pass = std::abs(rep.gap.mean) <= 3.0 * rep.gap.stderr_ + rep.allowance + 1e-12 * scale;
  }
  return rep;
}

SheetEnsemble coarsen(const SheetEnsemble& fine) {
  const GridSpec& fg = fine.grid();
  if (fg.nt() % 2 != 0 || fg.nx() % 2 != 0) throw ConfigError("coarsen: grid dimensions must be even");
  const GridSpec cg(fg.T(), fg.X(), fg.nt() / 2, fg.nx() / 2);
  const std::size_t n = fine.n_paths();
  std::vector<double> inc(n * cg.num_cells());
  std::vector<double> cor(n * cg.num_points());
  for (std::size_t p = 0; p < n; ++p) {
    for (int i = 0; i < cg.nt(); ++i) {
      for (int j = 0; j < cg.nx(); ++j) {
        inc[p * cg.num_cells() + cg.cell_index(i, j)] =
            fine.increment(p, 2 * i, 2 * j) + fine.increment(p, 2 * i + 1, 2 * j) +
            fine.increment(p, 2 * i, 2 * j + 1) + fine.increment(p, 2 * i + 1, 2 * j + 1);
      }
    }
    for (int i = 0; i <= cg.nt(); ++i) {
      for (int j = 0; j <= cg.nx(); ++j) {
        cor[p * cg.num_points() + cg.point_index(i, j)] = fine.value(p, 2 * i, 2 * j);
      }
    }
  }
  return SheetEnsemble(cg, fine.seed(), n, fine.first_path(), std::move(inc), std::move(cor));
}

double ito_grid_allowance(const SmoothFn& f,
                          const std::function<ProcessSpec(const GridSpec&)>& make_spec,
                          GridPoint coarse_z, const SheetEnsemble& fine) {
  const SheetEnsemble coarse = coarsen(fine);
  coarse.grid().require(coarse_z);
  auto gap = [&](const SheetEnsemble& e, GridPoint z) {
    const auto terms = all_terms(f, make_spec(e.grid()), z, e);
    return column(terms, [](const ItoTerms& t) { return t.lhs - t.deterministic_rhs(); }).mean;
  };
  const double gc = gap(coarse, coarse_z);
  const double gf = gap(fine, {2 * coarse_z.i, 2 * coarse_z.j});
  return 2.0 * std::abs(gf - gc);
}

ItoReport ibp_check(const ProcessSpec& p1, const ProcessSpec& p2, GridPoint z,
                    const SheetEnsemble& ensemble, double quad_tol) {
  const GridSpec& g = ensemble.grid();
  g.require(z);
  const double dA = g.cell_area();
  const std::size_t n = ensemble.n_paths();
  std::vector<double> lhs(n), drift(n), diff(n), wedge(n), rhs(n), gap(n);
  const double initial = p1.y0 * p2.y0;
  const double psi_term =
      (p1.psi.empty() || p2.psi.empty()) ? 0.0 : wedge_pair_sum(p1.psi, p2.psi, z);
  parallel_for(n, [&](std::size_t p) {
    const StatePath s1 = simulate_process(p1, ensemble, p);
    const StatePath s2 = simulate_process(p2, ensemble, p);
    Field a1(g), a2(g);
    double dr = 0.0, df = 0.0;
    for (int i = 0; i < z.i; ++i) {
      for (int j = 0; j < z.j; ++j) {
        const double t = g.t(i), x = g.x(j);
        const double y1 = s1.y(i, j), y2 = s2.y(i, j);
        a1(i, j) = p1.alpha(t, x, y1);
        a2(i, j) = p2.alpha(t, x, y2);
        dr += (y1 * a2(i, j) + y2 * a1(i, j)) * dA;
        df += p1.beta(t, x, y1) * p2.beta(t, x, y2) * dA;
      }
    }
    lhs[p] = s1.y(z) * s2.y(z);
    drift[p] = dr;
    diff[p] = df;
    wedge[p] = wedge_quadrature(a1, a2, z);
    rhs[p] = initial + dr + df + wedge[p] + psi_term;
    gap[p] = lhs[p] - rhs[p];
  });
  ItoReport rep;
  rep.lhs = estimate_mean(lhs);
  const MeanEstimate r = estimate_mean(rhs);
  rep.rhs_expectation = r.mean;
  rep.rhs_full = r.mean;
  rep.groups = {{"initial", {initial, 0.0, n}},
                {"drift_cross", estimate_mean(drift)},
                {"diffusion_cross", estimate_mean(diff)},
                {"wedge_drift", estimate_mean(wedge)},
                {"wedge_psi", {psi_term, 0.0, n}}};
  rep.gap = estimate_mean(gap);
  rep.allowance = quad_tol * std::max(1.0, std::abs(rep.lhs.mean));
  rep.pass = std::abs(rep.gap.mean) <= 3.0 * rep.gap.stderr_ + rep.allowance;
  return rep;
}

double bessel_root_r0() {
  static const double r0 = [] {
    auto h = [](double t) { return std::cyl_bessel_j(0.0, 2.0 * std::sqrt(t)); };
    double lo = 1.0, hi = 2.0;
    for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return r0;
}

WellPosedness bspde_wellposedness(double K1, double K2, double z0_area) {
  if (!(K1 >= 0.0) || !(K2 >= 0.0)) throw ConfigError("bspde_wellposedness: K1 and K2 must be >= 0");
  if (!(z0_area > 0.0)) throw ConfigError("bspde_wellposedness: area must be > 0");
  WellPosedness w;
  w.r0 = bessel_root_r0();
  const double m1 = std::sqrt(w.r0) - K1 * z0_area;
  const double m2 = 1.0 - K2 * K2 * z0_area;
  w.margin = std::min(m1, m2);
  w.well_posed = m1 > 0.0 && m2 > 0.0;
  return w;
}

}  // namespace sheetgame
