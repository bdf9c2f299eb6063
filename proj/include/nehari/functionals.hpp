#pragma once

#include "nehari/grid.hpp"

#include <stdexcept>
#include <string>

namespace nehari {

/// Raised when exponents or parameters violate an admissibility condition.
/// The message names the violated condition.
class AdmissibilityError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Subcritical perturbation f(u) (no explicit x-dependence).
///   none   : f = 0
///   linear : f(u) = u,             F(u) = u^2 / 2
///   power  : f(u) = |u|^{s-2} u,   F(u) = |u|^s / s
struct Perturbation {
  enum class Kind { none, linear, power };
  Kind kind = Kind::none;
  double exponent = 2.0; // s, used by Kind::power

  static Perturbation none() { return {}; }
  static Perturbation linear() { return {Kind::linear, 2.0}; }
  static Perturbation power(double s) { return {Kind::power, s}; }

  double f(double u) const;
  double primitive(double u) const;
  /// Homogeneity degree d with F(t u) = |t|^d F(u) (0 for none).
  double degree() const;

  std::string name() const;
  static Perturbation parse(const std::string &kind, double exponent);
};

/// Exponents and parameters of the scalar problem
///   -Delta_p u = lambda f(u) + |u|^{p*-2} u
/// and of the (p,q) system with coupling |u|^{alpha+1} |v|^{beta+1}.
struct ProblemSpec {
  int dim = 3;
  double p = 2.0;
  double q = 2.0;
  double alpha = 3.5;
  double beta = 0.5;
  double lambda = 0.0;
  double mu = 0.0;
  Perturbation perturbation_f{};
  Perturbation perturbation_g{};

  double p_star() const { return dim * p / (dim - p); }
  double q_star() const { return dim * q / (dim - q); }

  /// 1 < p < N and the growth condition on f.
  void validate_scalar() const;
  /// Scalar checks for both components, the critical condition
  /// (alpha+1)/p* + (beta+1)/q* = 1, and beta + 1 < q.
  void validate_system() const;
};

/// Tolerance used for the critical condition.
inline constexpr double kCriticalConditionTol = 1e-12;

/// Regularization of |u'|^{p-2} u' in derivative assembly for p < 2.
inline constexpr double kGradientRegularization = 1e-10;

// -- energies ---------------------------------------------------------------

/// int |u'|^s dx for the piecewise-linear interpolant (exact shell measure).
double gradient_energy(const Field &u, double s);

/// int |u_h|^s dx, Gauss quadrature of the interpolant on each cell.
double power_integral(const Field &u, double s);

/// int F(u_h) dx, same quadrature.
double primitive_integral(const Perturbation &pert, const Field &u);

double eval_P(const ProblemSpec &spec, const Field &u);
double eval_Q(const ProblemSpec &spec, const Field &v);
double eval_R(const ProblemSpec &spec, const Field &u, const Field &v);

/// J_lambda(u) = P(u)/p - ||u||_{p*}^{p*}/p* - lambda int F(u).
double eval_J(const ProblemSpec &spec, const Field &u);

/// I_{lambda,mu}(u,v) = (alpha+1)(P/p - lambda int F) + (beta+1)(Q/q - mu int G) - R.
double eval_I(const ProblemSpec &spec, const Field &u, const Field &v);

// -- derivatives ------------------------------------------------------------

/// Nodal gradient of u -> int |u'|^s: entry i is the derivative with respect
/// to u_i. For s < 2 the flux uses (|u'|^2 + delta^2)^{(s-2)/2} u'.
Field gradient_energy_gradient(const Field &u, double s);

/// Nodal gradient of J_lambda: entry i = dJ/du_i, so that
/// J'(u)(d) = sum_i g_i d_i.
Field j_gradient(const ProblemSpec &spec, const Field &u);

/// Nodal gradients of I_{lambda,mu} with respect to u and v.
struct SystemGradient {
  Field du;
  Field dv;
};
SystemGradient i_gradient(const ProblemSpec &spec, const Field &u, const Field &v);

/// J'(u)(direction).
double gateaux_residual(const ProblemSpec &spec, const Field &u, const Field &direction);

/// D_1 I(u,v)(direction) and D_2 I(u,v)(direction).
double gateaux_d1(const ProblemSpec &spec, const Field &u, const Field &v, const Field &direction);
double gateaux_d2(const ProblemSpec &spec, const Field &u, const Field &v, const Field &direction);

/// Euclidean pairing of a nodal gradient with a nodal direction.
double pair(const Field &gradient, const Field &direction);

/// L^{s'} norm (s' = s/(s-1)) of the lumped residual density g_i / w_i:
/// computable surrogate for the dual norm of a derivative.
double dual_norm_surrogate(const Field &gradient, double s);

} // namespace nehari
