#pragma once

// Reference computations written independently of the library code paths.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// J0(2 sqrt(t)) from its power series Σ (-t)^k / (k!)^2.
inline double j0_sqrt_series(double t) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -t / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Emission game with constant controls on [0,T]x[0,X]:
// J_i = a_i u_i^2 TX + c_i (y + (u1 + u2) TX)^2.
struct Emission {
  double a1, a2, c1, c2, y, T, X;

  // Joint minimiser of J1 + J2 restricted to u2 = (c2 a1 / (c1 a2)) u1,
  // i.e. the single-agent problem min β u^2 TX + (c1 + c2)(y + α u TX)^2.
  double reduced_cost(double u) const {
    const double ratio = c2 * a1 / (c1 * a2);
    const double alpha = 1.0 + ratio;
    const double beta = a1 + ratio * ratio * a2;
    const double A = T * X;
    return beta * u * u * A + (c1 + c2) * (y + alpha * u * A) * (y + alpha * u * A);
  }
  double reduced_closed_form() const {
    const double ratio = c2 * a1 / (c1 * a2);
    const double alpha = 1.0 + ratio;
    const double beta = a1 + ratio * ratio * a2;
    const double A = T * X;
    return -(c1 + c2) * alpha * y / (beta + (c1 + c2) * alpha * alpha * A);
  }
  // Nash equilibrium in constant controls: u_i = -c_i Y / a_i, Y = y / (1 + κ TX).
  std::array<double, 2> nash() const {
    const double kappa = c1 / a1 + c2 / a2;
    const double Y = y / (1.0 + kappa * T * X);
    return {-c1 * Y / a1, -c2 * Y / a2};
  }
};

// Deterministic two-region game on an nt x nx grid, controls read at the
// lower-left corner of each cell:
//   Y(i,j) = y + Σ_{i'<i, j'<j} (-α1 u1 - α2 u2 + S) dA,
//   J_k = Σ_cells ½ (Y(ll)^2 + β_k u_k(ll)^2) dA.
// Nash equilibrium by alternating exact best responses (each a quadratic
// minimisation solved densely).
struct TwoRegion {
  int nt, nx;
  double T, X;
  double alpha[2], beta[2];
  double S, y;

  int cells() const { return nt * nx; }
  Eigen::MatrixXd sum_matrix() const {
    const double dA = (T / nt) * (X / nx);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cells(), cells());
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < nx; ++j)
        for (int a = 0; a < i; ++a)
          for (int b = 0; b < j; ++b) A(i * nx + j, a * nx + b) = dA;
    return A;
  }
  Eigen::VectorXd best_response(int k, const Eigen::VectorXd& other) const {
    const Eigen::MatrixXd A = sum_matrix();
    const int o = 1 - k;
    const Eigen::VectorXd base =
        Eigen::VectorXd::Constant(cells(), y) + A * (Eigen::VectorXd::Constant(cells(), S) - alpha[o] * other);
    const Eigen::MatrixXd H = beta[k] * Eigen::MatrixXd::Identity(cells(), cells()) +
                              alpha[k] * alpha[k] * A.transpose() * A;
    return H.ldlt().solve(alpha[k] * A.transpose() * base);
  }
  std::array<Eigen::VectorXd, 2> nash(int max_rounds = 10000, double tol = 1e-14) const {
    Eigen::VectorXd u1 = Eigen::VectorXd::Zero(cells()), u2 = Eigen::VectorXd::Zero(cells());
    for (int r = 0; r < max_rounds; ++r) {
      const Eigen::VectorXd n1 = best_response(0, u2);
      const Eigen::VectorXd n2 = best_response(1, n1);
      const double change = std::max((n1 - u1).lpNorm<Eigen::Infinity>(), (n2 - u2).lpNorm<Eigen::Infinity>());
      u1 = n1;
      u2 = n2;
      if (change < tol) break;
    }
    return {u1, u2};
  }
  Eigen::VectorXd states_ll(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2) const {
    return Eigen::VectorXd::Constant(cells(), y) +
           sum_matrix() * (Eigen::VectorXd::Constant(cells(), S) - alpha[0] * u1 - alpha[1] * u2);
  }
};

}  // namespace oracle
