#pragma once

#include <vector>

namespace nehari {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (exact for polynomials of degree 2n-1).
const GaussRule &gauss_legendre(int n);

/// Integrates fn over [a, b] with the n-point rule.
template <class Fn> double gauss_integrate(Fn &&fn, double a, double b, int n) {
  const GaussRule &rule = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.points.size(); ++k)
    sum += rule.weights[k] * fn(mid + half * rule.points[k]);
  return half * sum;
}

} // namespace nehari
