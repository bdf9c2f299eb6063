#pragma once

// Independent oracles and generators for the test suites. Nothing here calls
// the library's quadrature, fiber or projection code.

#include "nehari/grid.hpp"
#include "nehari/functionals.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

inline double simpson_step(const std::function<double(double)> &f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson with Richardson correction.
inline double adaptive_simpson(const std::function<double(double)> &f, double a, double b, double tol = 1e-12,
                               int depth = 50) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// int_0^inf f by adaptive Simpson on geometric panels [0, a0], [a0, 2 a0], ...
inline double integrate_half_line(const std::function<double(double)> &f, double a0, double rel_tol = 1e-12) {
  double total = adaptive_simpson(f, 0.0, a0, 1e-14);
  for (double a = a0; a < 1e12; a *= 2.0) {
    const double piece = adaptive_simpson(f, a, 2.0 * a, 1e-14);
    total += piece;
    if (std::abs(piece) < rel_tol * std::abs(total) && a > 1e3 * a0)
      break;
  }
  return total;
}

inline double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

/// Best Sobolev constant S_p in ||grad u||_p^p >= S ||u||_{p*}^p (closed form).
inline double sobolev_closed_form(int n, double p) {
  const double N = n;
  const double ratio = std::tgamma(1.0 + N / 2.0) * std::tgamma(N) / (std::tgamma(N / p) * std::tgamma(1.0 + N - N / p));
  const double c = std::pow(std::numbers::pi, -0.5) * std::pow(N, -1.0 / p) * std::pow((p - 1.0) / (N - p), 1.0 - 1.0 / p) *
                   std::pow(ratio, 1.0 / N);
  return std::pow(c, -p);
}

/// Talenti profile written out independently of the library.
struct Talenti {
  int n;
  double p, eps;
  double cn() const { return std::pow(n * std::pow((n - p) / (p - 1.0), p - 1.0), (n - p) / (p * p)); }
  double value(double r) const {
    return cn() * std::pow(eps, (n - p) / (p * p)) * std::pow(eps + std::pow(r, p / (p - 1.0)), (p - n) / p);
  }
  double slope(double r) const {
    const double k = p / (p - 1.0), b = (p - n) / p;
    return cn() * std::pow(eps, (n - p) / (p * p)) * b * std::pow(eps + std::pow(r, k), b - 1.0) * k *
           std::pow(r, k - 1.0);
  }
};

/// Sobolev quotient of the Talenti profile by adaptive quadrature on (0, inf).
inline double talenti_quotient(int n, double p, double eps) {
  const Talenti t{n, p, eps};
  const double ps = n * p / (n - p), w = sphere_area(n);
  const double scale = std::pow(eps, (p - 1.0) / p);
  const double grad = integrate_half_line([&](double r) { return w * std::pow(std::abs(t.slope(r)), p) * std::pow(r, n - 1); }, scale);
  const double crit = integrate_half_line([&](double r) { return w * std::pow(t.value(r), ps) * std::pow(r, n - 1); }, scale);
  return grad / std::pow(crit, p / ps);
}

/// Minimizer of a unimodal f on [a, b].
inline double golden_section(const std::function<double(double)> &f, double a, double b, double tol = 1e-13) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline double central_difference(const std::function<double(double)> &f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

} // namespace oracle

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

inline int pick(Rng &rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

/// Smooth positive radial field vanishing at r = R: sum_k c_k cos-like modes.
inline nehari::Field smooth_field(const nehari::GridPtr &grid, Rng &rng) {
  double c[4];
  for (double &x : c)
    x = uniform(rng, 0.2, 1.0);
  const double shift = uniform(rng, -0.3, 0.3);
  const double R = grid->radius();
  return nehari::Field::sample(grid, [&](double r) {
    const double x = 1.0 - (r / R) * (r / R);
    return x * (c[0] + c[1] * x + c[2] * x * x + c[3] * std::cos(3.0 * r / R + shift) * x);
  });
}

/// Admissible system spec with p = q drawn at random.
inline nehari::ProblemSpec equal_exponent_system(Rng &rng) {
  for (;;) {
    nehari::ProblemSpec s;
    s.dim = pick(rng, 3, 8);
    s.p = s.q = uniform(rng, 1.2, s.dim - 0.2);
    const double ps = s.p_star();
    s.beta = uniform(rng, 0.0, s.p - 1.0) * 0.999;
    s.alpha = ps - s.beta - 2.0;
    if (s.alpha >= 0.0)
      return s;
  }
}

/// Admissible system spec with independent p, q.
inline nehari::ProblemSpec admissible_system(Rng &rng) {
  for (;;) {
    nehari::ProblemSpec s;
    s.dim = pick(rng, 3, 8);
    s.p = uniform(rng, 1.2, s.dim - 0.2);
    s.q = uniform(rng, 1.2, s.dim - 0.2);
    s.beta = uniform(rng, 0.0, s.q - 1.0) * 0.999;
    const double a1 = s.p_star() * (1.0 - (s.beta + 1.0) / s.q_star());
    if (a1 >= 1.0) {
      s.alpha = a1 - 1.0;
      return s;
    }
  }
}

} // namespace gen
