#pragma once

#include "nehari/functionals.hpp"

#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nehari {

/// Raised when a field cannot be projected onto a Nehari set (zero field,
/// vanishing coupling, or no positive critical point along the fiber).
class ProjectionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Which positive critical point of the fiber map to keep when several exist.
enum class FiberSelection {
  lowest_energy,  ///< smallest J(t u); the choice that realizes inf over the Nehari set
  highest_energy, ///< the fiber maximizer
};

/// A point of a Nehari set: projected field(s), fiber scalings, energy and
/// relative fiber-stationarity residuals.
///
/// Scalar points carry one field and scalings {t0}; system points carry
/// (u, v) and scalings {s0, t0}. Residuals are J'(w)(w) / P(w) for scalar
/// points and D_1 I(w)(u) / ((alpha+1) P(u)), D_2 I(w)(v) / ((beta+1) Q(v))
/// for system points.
struct NehariPoint {
  std::vector<Field> fields;
  std::vector<double> scalings;
  double energy = 0.0;
  std::vector<double> residuals;

  bool is_system() const { return fields.size() == 2; }
  double max_residual() const;
};

void write_nehari_json(std::ostream &os, const NehariPoint &point);

// -- scalar fibers ----------------------------------------------------------

/// t -> J_lambda(t u) for t >= 0, assembled from the homogeneous pieces of u:
///   J(t u) = t^p P/p - t^{p*} C/p* - lambda t^d A,
/// with C = ||u||_{p*}^{p*}, A = int F(u) and d the perturbation degree.
class ScalarFiber {
public:
  ScalarFiber(const ProblemSpec &spec, const Field &u);

  double value(double t) const;
  double derivative(double t) const;
  /// derivative(t) * t / (t^p P): the dimensionless Nehari residual.
  double relative_derivative(double t) const;

  double P() const { return P_; }
  double C() const { return C_; }
  double A() const { return A_; }

  /// All positive critical points, increasing.
  std::vector<double> critical_points() const;

private:
  double p_, ps_, d_, lambda_;
  double P_, C_, A_;
};

/// Samples (t, J_lambda(t u)) for every t.
std::vector<std::pair<double, double>> fiber_map(const ProblemSpec &spec, const Field &u,
                                                 const std::vector<double> &t_values);

/// t0(u) = (P(u) / ||u||_{p*}^{p*})^{1/(p*-p)}: the scaling with t0 u in N_{J_0}.
double t0_scalar(const ProblemSpec &spec, const Field &u);

/// Projects u onto N_{J_lambda}. Closed form when lambda = 0 or there is no
/// perturbation; otherwise safeguarded Newton on the fiber derivative,
/// bracketed by a logarithmic scan.
NehariPoint project_scalar(const ProblemSpec &spec, const Field &u,
                           FiberSelection selection = FiberSelection::lowest_energy);

// -- systems ----------------------------------------------------------------

/// r = (alpha+1) q / (q - (beta+1)); throws AdmissibilityError unless r > p.
double r_exponent(const ProblemSpec &spec);

/// (s, t) -> I_{lambda,mu}(s u, t v) assembled from homogeneous pieces.
class SystemFiber {
public:
  SystemFiber(const ProblemSpec &spec, const Field &u, const Field &v);

  double value(double s, double t) const;
  double d_s(double s, double t) const;
  double d_t(double s, double t) const;
  double relative_d_s(double s, double t) const;
  double relative_d_t(double s, double t) const;

  double P() const { return P_; }
  double Q() const { return Q_; }
  double R() const { return R_; }

private:
  ProblemSpec spec_;
  double df_, dg_;
  double P_, Q_, R_, Af_, Ag_;
};

/// Closed-form (s0, t0) for the lambda = mu = 0 projection.
std::pair<double, double> system_scalings_00(const ProblemSpec &spec, double P, double Q, double R);

/// Projects (u, v) onto N_{lambda,mu}: explicit formulas for lambda = mu = 0,
/// damped Newton with parameter continuation otherwise.
NehariPoint project_system(const ProblemSpec &spec, const Field &u, const Field &v);

/// K(X, Y) = [P(X)^{alpha+1} Q(Y)^{(beta+1)p/q} / R(X,Y)^p]^{r/((alpha+1)(r-p))}.
double k_functional(const ProblemSpec &spec, const Field &x, const Field &y);

/// Same formula from precomputed P, Q, R.
double k_functional(const ProblemSpec &spec, double P, double Q, double R);

} // namespace nehari
