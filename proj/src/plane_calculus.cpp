#include "sheetgame/plane_calculus.hpp"

#include <algorithm>
#include <string>

#include "sheetgame/errors.hpp"

namespace sheetgame {

Field Field::from_function(const GridSpec& grid, const std::function<double(double, double)>& f) {
  Field out(grid);
  for (int i = 0; i <= grid.nt(); ++i) {
    for (int j = 0; j <= grid.nx(); ++j) out(i, j) = f(grid.t(i), grid.x(j));
  }
  return out;
}

PairField PairField::from_function(
    const GridSpec& grid, const std::function<double(double, double, double, double)>& psi) {
  PairField out(grid);
  for (int i = 0; i < grid.nt(); ++i) {
    for (int j = 0; j < grid.nx(); ++j) {
      for (int ip = 0; ip < grid.nt(); ++ip) {
        for (int jp = 0; jp < grid.nx(); ++jp) {
          out({i, j}, {ip, jp}) = psi(grid.t(i), grid.x(j), grid.t(ip), grid.x(jp));
        }
      }
    }
  }
  return out;
}

PairField PairField::constant(const GridSpec& grid, double v) {
  PairField out(grid);
  std::fill(out.values_.begin(), out.values_.end(), v);
  return out;
}

namespace {

// P(i, j) = Σ_{i <= i' < I, 0 <= j' < j} a(i', j'), for 0 <= i <= I, 0 <= j <= J.
class UpperLeftSums {
 public:
  UpperLeftSums(const Field& a, int I, int J) : J_(J), sums_((I + 1) * (J + 1), 0.0) {
    for (int i = I - 1; i >= 0; --i) {
      double row = 0.0;
      for (int j = 0; j < J; ++j) {
        row += a(i, j);
        at(i, j + 1) = at(i + 1, j + 1) + row;
      }
    }
  }
  double operator()(int i, int j) const { return sums_[i * (J_ + 1) + j]; }

 private:
  double& at(int i, int j) { return sums_[i * (J_ + 1) + j]; }
  int J_;
  std::vector<double> sums_;
};

void require_path(const SheetEnsemble& e, std::size_t path) {
  if (path >= e.n_paths()) {
    throw UsageError("path " + std::to_string(path) + " out of range (" +
                     std::to_string(e.n_paths()) + " paths)");
  }
}

}  // namespace

double lebesgue_integral(const Field& phi, GridPoint z) {
  const GridSpec& g = phi.grid();
  g.require(z);
  double s = 0.0;
  for (int i = 0; i < z.i; ++i) {
    for (int j = 0; j < z.j; ++j) s += phi(i, j);
  }
  return s * g.cell_area();
}

double lebesgue_integral(const Field& phi, PlanePoint z) {
  return lebesgue_integral(phi, phi.grid().locate(z));
}

double ito_integral(const Field& phi, const SheetEnsemble& ensemble, std::size_t path, GridPoint z) {
  if (!phi.adapted()) {
    throw ContractViolation("ito_integral: integrand is not adapted to the sheet filtration");
  }
  ensemble.grid().require(z);
  require_path(ensemble, path);
  double s = 0.0;
  for (int i = 0; i < z.i; ++i) {
    for (int j = 0; j < z.j; ++j) s += phi(i, j) * ensemble.increment(path, i, j);
  }
  return s;
}

double double_ito_integral(const PairField& psi, const SheetEnsemble& ensemble, std::size_t path,
                           GridPoint z) {
  ensemble.grid().require(z);
  require_path(ensemble, path);
  double s = 0.0;
  for (int ip = 0; ip < z.i; ++ip) {
    for (int jp = 0; jp < z.j; ++jp) {
      double inner = 0.0;
      for (int i = 0; i <= ip; ++i) {
        for (int j = jp; j < z.j; ++j) {
          if (i == ip && j == jp) continue;
          inner += psi({i, j}, {ip, jp}) * ensemble.increment(path, i, j);
        }
      }
      s += inner * ensemble.increment(path, ip, jp);
    }
  }
  return s;
}

std::pair<double, double> mixed_integrals(const PairField& psi, const SheetEnsemble& ensemble,
                                          std::size_t path, GridPoint z) {
  ensemble.grid().require(z);
  require_path(ensemble, path);
  const double dA = ensemble.grid().cell_area();
  double s1 = 0.0;
  double s2 = 0.0;
  for (int ip = 0; ip < z.i; ++ip) {
    for (int jp = 0; jp < z.j; ++jp) {
      const double dBp = ensemble.increment(path, ip, jp);
      for (int i = 0; i <= ip; ++i) {
        for (int j = jp; j < z.j; ++j) {
          if (i == ip && j == jp) continue;
          const double w = psi({i, j}, {ip, jp});
          s1 += w * dA * dBp;
          s2 += w * ensemble.increment(path, i, j) * dA;
        }
      }
    }
  }
  return {s1, s2};
}

double star(const Field& h, const Field& k, GridPoint z, GridPoint horizon) {
  const GridSpec& g = h.grid();
  g.require(z);
  g.require(horizon);
  if (z.i > horizon.i || z.j > horizon.j) {
    throw UsageError("star: point lies beyond the horizon");
  }
  double sum_k = 0.0;
  double sum_h = 0.0;
  for (int i = z.i; i < horizon.i; ++i) {
    for (int j = 0; j < z.j; ++j) {
      sum_k += k(i, j);
      sum_h += h(i, j);
    }
  }
  return (h(z) * sum_k + k(z) * sum_h) * g.cell_area();
}

Field star_field(const Field& h, const Field& k, GridPoint horizon) {
  const GridSpec& g = h.grid();
  g.require(horizon);
  const UpperLeftSums Sk(k, horizon.i, horizon.j);
  const UpperLeftSums Sh(h, horizon.i, horizon.j);
  Field out(g, 0.0, false);
  const double dA = g.cell_area();
  for (int i = 0; i <= horizon.i; ++i) {
    for (int j = 0; j <= horizon.j; ++j) {
      out(i, j) = (h(i, j) * Sk(i, j) + k(i, j) * Sh(i, j)) * dA;
    }
  }
  return out;
}

std::pair<double, double> star_double_identity(const Field& a1, const Field& a2, GridPoint z) {
  const GridSpec& g = a1.grid();
  g.require(z);
  const double dA = g.cell_area();

  // Exact measure of {t <= t', x >= x'} on a cell pair, in units of dA^2.
  auto time_weight = [](int i, int ip) { return i < ip ? 1.0 : (i == ip ? 0.5 : 0.0); };
  auto space_weight = [](int j, int jp) { return j > jp ? 1.0 : (j == jp ? 0.5 : 0.0); };

  double lhs = 0.0;
  for (int i = 0; i < z.i; ++i) {
    for (int j = 0; j < z.j; ++j) {
      for (int ip = 0; ip < z.i; ++ip) {
        const double wt = time_weight(i, ip);
        if (wt == 0.0) continue;
        for (int jp = 0; jp < z.j; ++jp) {
          const double wx = space_weight(j, jp);
          if (wx == 0.0) continue;
          lhs += wt * wx * (a1(ip, jp) * a2(i, j) + a1(i, j) * a2(ip, jp));
        }
      }
    }
  }
  lhs *= dA * dA;

  // Cell average of (a1 ⋆ a2) with horizon z: own row and column count half.
  const UpperLeftSums S1(a1, z.i, z.j);
  const UpperLeftSums S2(a2, z.i, z.j);
  auto weighted = [&](const UpperLeftSums& S, const Field& a, int i, int j) {
    const double strict = S(i + 1, j);
    const double same_space = S(i + 1, j + 1) - S(i + 1, j);
    const double same_time = S(i, j) - S(i + 1, j);
    return strict + 0.5 * same_space + 0.5 * same_time + 0.25 * a(i, j);
  };
  double rhs = 0.0;
  for (int i = 0; i < z.i; ++i) {
    for (int j = 0; j < z.j; ++j) {
      rhs += a1(i, j) * weighted(S2, a2, i, j) + a2(i, j) * weighted(S1, a1, i, j);
    }
  }
  rhs *= dA * dA;
  return {lhs, rhs};
}

double conditional_projection(GridPoint zeta, GridPoint z, const SheetEnsemble& ensemble,
                              std::size_t path) {
  const GridSpec& g = ensemble.grid();
  g.require(zeta);
  g.require(z);
  require_path(ensemble, path);
  return ensemble.value(path, std::min(zeta.i, z.i), std::min(zeta.j, z.j));
}

double wedge_quadrature(const Field& a1, const Field& a2, GridPoint z) {
  const GridSpec& g = a1.grid();
  g.require(z);
  const UpperLeftSums S1(a1, z.i, z.j);
  const UpperLeftSums S2(a2, z.i, z.j);
  double s = 0.0;
  for (int i = 0; i < z.i; ++i) {
    for (int j = 0; j < z.j; ++j) {
      // S(i, j + 1): cells with i' >= i and j' <= j, including (i, j) itself.
      s += a2(i, j) * S1(i, j + 1) + a1(i, j) * S2(i, j + 1) - a1(i, j) * a2(i, j);
    }
  }
  const double dA = g.cell_area();
  return s * dA * dA;
}

double wedge_pair_sum(const PairField& psi1, const PairField& psi2, GridPoint z) {
  const GridSpec& g = psi1.grid();
  g.require(z);
  double s = 0.0;
  for (int ip = 0; ip < z.i; ++ip) {
    for (int jp = 0; jp < z.j; ++jp) {
      for (int i = 0; i <= ip; ++i) {
        for (int j = jp; j < z.j; ++j) {
          if (i == ip && j == jp) continue;
          s += psi1({i, j}, {ip, jp}) * psi2({i, j}, {ip, jp});
        }
      }
    }
  }
  const double dA = g.cell_area();
  return s * dA * dA;
}

}  // namespace sheetgame
