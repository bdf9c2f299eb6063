#include "nehari/functionals.hpp"

#include <cmath>
#include <sstream>

namespace nehari {

namespace {

// sign(u) |u|^a with the convention 0 at u = 0.
double signed_pow(double u, double a) {
  if (u == 0.0)
    return 0.0;
  return std::copysign(std::pow(std::abs(u), a), u);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_growth(const Perturbation &pert, double critical, const char *which) {
  switch (pert.kind) {
  case Perturbation::Kind::none:
    return;
  case Perturbation::Kind::linear:
    if (!(critical > 2.0))
      throw AdmissibilityError(std::string("growth condition violated: linear ") + which +
                               " = u is not o(u^{crit-1}) since the critical exponent " + fmt(critical) +
                               " <= 2");
    return;
  case Perturbation::Kind::power:
    if (!std::isfinite(pert.exponent) || !(pert.exponent > 1.0) || !(pert.exponent < critical))
      throw AdmissibilityError(std::string("growth condition violated: power ") + which + " exponent " +
                               fmt(pert.exponent) + " must lie strictly between 1 and the critical exponent " +
                               fmt(critical));
    return;
  }
}

void check_exponent(double p, int dim, const char *name) {
  if (!std::isfinite(p) || !(p > 1.0) || !(p < dim))
    throw AdmissibilityError(std::string("(H1) violated: need 1 < ") + name + " < N, got " + name + " = " + fmt(p) +
                             ", N = " + std::to_string(dim));
}

void check_dim(int dim) {
  if (dim < 3)
    throw AdmissibilityError("dimension must satisfy N >= 3, got N = " + std::to_string(dim));
}

double at(const Field &u, const RadialGrid::QuadraturePoint &qp) {
  return qp.left * u[qp.cell] + qp.right * u[qp.cell + 1];
}

// Flux phi(s) = d/ds |s|^e, regularized for e < 2.
double flux(double slope, double e) {
  if (e < 2.0)
    return e * std::pow(slope * slope + kGradientRegularization * kGradientRegularization, 0.5 * (e - 2.0)) * slope;
  return e * signed_pow(slope, e - 1.0);
}

} // namespace

double Perturbation::f(double u) const {
  switch (kind) {
  case Kind::none:
    return 0.0;
  case Kind::linear:
    return u;
  case Kind::power:
    return signed_pow(u, exponent - 1.0);
  }
  return 0.0;
}

double Perturbation::primitive(double u) const {
  switch (kind) {
  case Kind::none:
    return 0.0;
  case Kind::linear:
    return 0.5 * u * u;
  case Kind::power:
    return std::pow(std::abs(u), exponent) / exponent;
  }
  return 0.0;
}

double Perturbation::degree() const {
  switch (kind) {
  case Kind::none:
    return 0.0;
  case Kind::linear:
    return 2.0;
  case Kind::power:
    return exponent;
  }
  return 0.0;
}

std::string Perturbation::name() const {
  switch (kind) {
  case Kind::none:
    return "none";
  case Kind::linear:
    return "linear";
  case Kind::power:
    return "power";
  }
  return "none";
}

Perturbation Perturbation::parse(const std::string &kind, double exponent) {
  if (kind == "none")
    return none();
  if (kind == "linear")
    return linear();
  if (kind == "power")
    return power(exponent);
  throw AdmissibilityError("unknown perturbation kind '" + kind + "' (expected none, linear or power)");
}

void ProblemSpec::validate_scalar() const {
  check_dim(dim);
  check_exponent(p, dim, "p");
  check_growth(perturbation_f, p_star(), "f");
  if (!std::isfinite(lambda))
    throw AdmissibilityError("lambda must be finite");
}

void ProblemSpec::validate_system() const {
  validate_scalar();
  check_exponent(q, dim, "q");
  check_growth(perturbation_g, q_star(), "g");
  if (!std::isfinite(mu))
    throw AdmissibilityError("mu must be finite");
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 || beta < 0.0)
    throw AdmissibilityError("alpha and beta must be finite and nonnegative");
  const double balance = (alpha + 1.0) / p_star() + (beta + 1.0) / q_star();
  if (std::abs(balance - 1.0) > kCriticalConditionTol)
    throw AdmissibilityError("(H2) critical condition violated: (alpha+1)/p* + (beta+1)/q* = " + fmt(balance) +
                             " != 1");
  if (!(beta + 1.0 < q))
    throw AdmissibilityError("beta + 1 < q required for r = (alpha+1)q/(q-(beta+1)) to exceed p, got beta + 1 = " +
                             fmt(beta + 1.0) + ", q = " + fmt(q));
}

double gradient_energy(const Field &u, double s) {
  const RadialGrid &g = u.grid();
  const auto vol = g.shell_volumes();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const double slope = (u[c + 1] - u[c]) / g.spacing(c);
    sum += std::pow(std::abs(slope), s) * vol[c];
  }
  return sum;
}

double power_integral(const Field &u, double s) {
  double sum = 0.0;
  for (const auto &qp : u.grid().quadrature())
    sum += qp.weight * std::pow(std::abs(at(u, qp)), s);
  return sum;
}

double primitive_integral(const Perturbation &pert, const Field &u) {
  if (pert.kind == Perturbation::Kind::none)
    return 0.0;
  double sum = 0.0;
  for (const auto &qp : u.grid().quadrature())
    sum += qp.weight * pert.primitive(at(u, qp));
  return sum;
}

double eval_P(const ProblemSpec &spec, const Field &u) { return gradient_energy(u, spec.p); }

double eval_Q(const ProblemSpec &spec, const Field &v) { return gradient_energy(v, spec.q); }

double eval_R(const ProblemSpec &spec, const Field &u, const Field &v) {
  require_same_grid(u, v);
  double sum = 0.0;
  for (const auto &qp : u.grid().quadrature())
    sum += qp.weight * std::pow(std::abs(at(u, qp)), spec.alpha + 1.0) * std::pow(std::abs(at(v, qp)), spec.beta + 1.0);
  return sum;
}

double eval_J(const ProblemSpec &spec, const Field &u) {
  const double ps = spec.p_star();
  return eval_P(spec, u) / spec.p - power_integral(u, ps) / ps -
         spec.lambda * primitive_integral(spec.perturbation_f, u);
}

double eval_I(const ProblemSpec &spec, const Field &u, const Field &v) {
  require_same_grid(u, v);
  const double part_u = eval_P(spec, u) / spec.p - spec.lambda * primitive_integral(spec.perturbation_f, u);
  const double part_v = eval_Q(spec, v) / spec.q - spec.mu * primitive_integral(spec.perturbation_g, v);
  return (spec.alpha + 1.0) * part_u + (spec.beta + 1.0) * part_v - eval_R(spec, u, v);
}

Field gradient_energy_gradient(const Field &u, double s) {
  const RadialGrid &g = u.grid();
  const auto vol = g.shell_volumes();
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const double h = g.spacing(c);
    const double phi = flux((u[c + 1] - u[c]) / h, s) * vol[c] / h;
    out[c] -= phi;
    out[c + 1] += phi;
  }
  return Field(u.grid_ptr(), std::move(out));
}

Field j_gradient(const ProblemSpec &spec, const Field &u) {
  Field grad = gradient_energy_gradient(u, spec.p);
  grad *= 1.0 / spec.p;
  auto &g = grad.mutable_values();
  const double ps = spec.p_star();
  for (const auto &qp : u.grid().quadrature()) {
    const double uh = at(u, qp);
    const double dens = qp.weight * (signed_pow(uh, ps - 1.0) + spec.lambda * spec.perturbation_f.f(uh));
    g[qp.cell] -= qp.left * dens;
    g[qp.cell + 1] -= qp.right * dens;
  }
  return grad;
}

SystemGradient i_gradient(const ProblemSpec &spec, const Field &u, const Field &v) {
  require_same_grid(u, v);
  const double a1 = spec.alpha + 1.0, b1 = spec.beta + 1.0;
  Field gu = gradient_energy_gradient(u, spec.p);
  gu *= a1 / spec.p;
  Field gv = gradient_energy_gradient(v, spec.q);
  gv *= b1 / spec.q;
  auto &du = gu.mutable_values();
  auto &dv = gv.mutable_values();
  for (const auto &qp : u.grid().quadrature()) {
    const double uh = at(u, qp), vh = at(v, qp);
    const double au = std::abs(uh), av = std::abs(vh);
    const double eu = qp.weight * (a1 * spec.lambda * spec.perturbation_f.f(uh) + a1 * (signed_pow(uh, spec.alpha) * std::pow(av, b1)));
    const double ev = qp.weight * (b1 * spec.mu * spec.perturbation_g.f(vh) + b1 * (signed_pow(vh, spec.beta) * std::pow(au, a1)));
    du[qp.cell] -= qp.left * eu;
    du[qp.cell + 1] -= qp.right * eu;
    dv[qp.cell] -= qp.left * ev;
    dv[qp.cell + 1] -= qp.right * ev;
  }
  return {std::move(gu), std::move(gv)};
}

double pair(const Field &gradient, const Field &direction) {
  require_same_grid(gradient, direction);
  double sum = 0.0;
  for (std::size_t i = 0; i < gradient.size(); ++i)
    sum += gradient[i] * direction[i];
  return sum;
}

double gateaux_residual(const ProblemSpec &spec, const Field &u, const Field &direction) {
  return pair(j_gradient(spec, u), direction);
}

double gateaux_d1(const ProblemSpec &spec, const Field &u, const Field &v, const Field &direction) {
  return pair(i_gradient(spec, u, v).du, direction);
}

double gateaux_d2(const ProblemSpec &spec, const Field &u, const Field &v, const Field &direction) {
  return pair(i_gradient(spec, u, v).dv, direction);
}

double dual_norm_surrogate(const Field &gradient, double s) {
  const double conj = s / (s - 1.0);
  const auto w = gradient.grid().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (w[i] > 0.0)
      sum += w[i] * std::pow(std::abs(gradient[i] / w[i]), conj);
  }
  return std::pow(sum, 1.0 / conj);
}

} // namespace nehari
