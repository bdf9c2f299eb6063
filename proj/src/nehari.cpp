#include "nehari/nehari.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <json.hpp>

namespace nehari {

double NehariPoint::max_residual() const {
  double m = 0.0;
  for (double r : residuals)
    m = std::max(m, std::abs(r));
  return m;
}

void write_nehari_json(std::ostream &os, const NehariPoint &point) {
  nlohmann::json j;
  j["kind"] = point.is_system() ? "system" : "scalar";
  j["scalings"] = point.scalings;
  j["energy"] = point.energy;
  j["residuals"] = point.residuals;
  os << std::setprecision(17) << j.dump(2) << '\n';
}

// -- scalar -------------------------------------------------------------------

ScalarFiber::ScalarFiber(const ProblemSpec &spec, const Field &u)
    : p_(spec.p), ps_(spec.p_star()), d_(spec.perturbation_f.degree()), lambda_(spec.lambda),
      P_(eval_P(spec, u)), C_(power_integral(u, spec.p_star())), A_(primitive_integral(spec.perturbation_f, u)) {}

double ScalarFiber::value(double t) const {
  const double at = std::abs(t);
  double v = std::pow(at, p_) * P_ / p_ - std::pow(at, ps_) * C_ / ps_;
  if (d_ > 0.0)
    v -= lambda_ * std::pow(at, d_) * A_;
  return v;
}

double ScalarFiber::derivative(double t) const {
  double v = std::pow(t, p_ - 1.0) * P_ - std::pow(t, ps_ - 1.0) * C_;
  if (d_ > 0.0)
    v -= lambda_ * d_ * std::pow(t, d_ - 1.0) * A_;
  return v;
}

double ScalarFiber::relative_derivative(double t) const {
  double h = 1.0 - std::pow(t, ps_ - p_) * C_ / P_;
  if (d_ > 0.0)
    h -= lambda_ * d_ * A_ * std::pow(t, d_ - p_) / P_;
  return h;
}

std::vector<double> ScalarFiber::critical_points() const {
  if (!(P_ > 0.0) || !(C_ > 0.0))
    return {};
  const double t_crit = std::pow(P_ / C_, 1.0 / (ps_ - p_));
  const bool perturbed = d_ > 0.0 && lambda_ != 0.0 && A_ != 0.0;
  if (!perturbed)
    return {t_crit};

  // h(x) = relative derivative at t = e^x; its positive zeros are the
  // critical points.
  const double lam_term = lambda_ * d_ * A_;
  auto h = [&](double x) {
    const double t = std::exp(x);
    return 1.0 - std::pow(t, ps_ - p_) * C_ / P_ - lam_term * std::pow(t, d_ - p_) / P_;
  };
  auto dh = [&](double x) {
    const double t = std::exp(x);
    return -(ps_ - p_) * std::pow(t, ps_ - p_) * C_ / P_ - lam_term * (d_ - p_) * std::pow(t, d_ - p_) / P_;
  };

  std::vector<double> scales{t_crit};
  if (d_ != p_)
    scales.push_back(std::pow(std::abs(lam_term) / P_, 1.0 / (p_ - d_)));
  if (d_ != ps_)
    scales.push_back(std::pow(std::abs(lam_term) / C_, 1.0 / (ps_ - d_)));
  const auto [lo_it, hi_it] = std::minmax_element(scales.begin(), scales.end());
  const double x_lo = std::log(*lo_it) - 8.0, x_hi = std::log(*hi_it) + 8.0;
  constexpr int kSamples = 800;

  std::vector<double> roots;
  double xa = x_lo, ha = h(xa);
  for (int k = 1; k <= kSamples; ++k) {
    const double xb = x_lo + (x_hi - x_lo) * k / kSamples;
    const double hb = h(xb);
    if (ha == 0.0) {
      roots.push_back(std::exp(xa));
    } else if ((ha < 0.0) != (hb < 0.0) && hb != 0.0) {
      // Safeguarded Newton inside [lo, hi].
      double lo = xa, hi = xb, flo = ha;
      double x = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        const double fx = h(x);
        if (fx == 0.0)
          break;
        if ((fx < 0.0) == (flo < 0.0)) {
          lo = x;
          flo = fx;
        } else {
          hi = x;
        }
        const double slope = dh(x);
        double next = slope != 0.0 ? x - fx / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
          next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-15 * std::max(1.0, std::abs(x)) || hi - lo < 1e-15) {
          x = next;
          break;
        }
        x = next;
      }
      roots.push_back(std::exp(x));
    }
    xa = xb;
    ha = hb;
  }
  return roots;
}

std::vector<std::pair<double, double>> fiber_map(const ProblemSpec &spec, const Field &u,
                                                 const std::vector<double> &t_values) {
  if (t_values.empty())
    throw ParameterError("fiber_map: empty list of t values");
  if (u.is_zero())
    throw ProjectionError("fiber_map: the zero field has no fiber");
  const ScalarFiber fiber(spec, u);
  std::vector<std::pair<double, double>> out;
  out.reserve(t_values.size());
  for (double t : t_values)
    out.emplace_back(t, fiber.value(t));
  return out;
}

double t0_scalar(const ProblemSpec &spec, const Field &u) {
  if (u.is_zero())
    throw ProjectionError("t0_scalar: the zero field is excluded from the Nehari set");
  const double P = eval_P(spec, u);
  const double C = power_integral(u, spec.p_star());
  if (!(P > 0.0) || !(C > 0.0))
    throw ProjectionError("t0_scalar: degenerate field (zero gradient or zero critical norm)");
  return std::pow(P / C, 1.0 / (spec.p_star() - spec.p));
}

NehariPoint project_scalar(const ProblemSpec &spec, const Field &u, FiberSelection selection) {
  if (u.is_zero())
    throw ProjectionError("project_scalar: the zero field is excluded from the Nehari set");
  const ScalarFiber fiber(spec, u);
  const auto roots = fiber.critical_points();
  if (roots.empty())
    throw ProjectionError("project_scalar: the fiber map has no positive critical point");
  double best_t = roots.front();
  double best_e = fiber.value(best_t);
  for (double t : roots) {
    const double e = fiber.value(t);
    const bool better = selection == FiberSelection::lowest_energy ? e < best_e : e > best_e;
    if (better) {
      best_t = t;
      best_e = e;
    }
  }
  NehariPoint point;
  point.fields.push_back(best_t * u);
  point.scalings = {best_t};
  point.energy = eval_J(spec, point.fields.front());
  point.residuals = {fiber.relative_derivative(best_t)};
  return point;
}

// -- systems ------------------------------------------------------------------

double r_exponent(const ProblemSpec &spec) {
  const double gap = spec.q - (spec.beta + 1.0);
  if (!(gap > 0.0))
    throw AdmissibilityError("beta + 1 < q required for the exponent r");
  const double r = (spec.alpha + 1.0) * spec.q / gap;
  if (!(r > spec.p))
    throw AdmissibilityError("r = (alpha+1)q/(q-(beta+1)) must exceed p");
  return r;
}

SystemFiber::SystemFiber(const ProblemSpec &spec, const Field &u, const Field &v)
    : spec_(spec), df_(spec.perturbation_f.degree()), dg_(spec.perturbation_g.degree()), P_(eval_P(spec, u)),
      Q_(eval_Q(spec, v)), R_(eval_R(spec, u, v)), Af_(primitive_integral(spec.perturbation_f, u)),
      Ag_(primitive_integral(spec.perturbation_g, v)) {}

double SystemFiber::value(double s, double t) const {
  const double a1 = spec_.alpha + 1.0, b1 = spec_.beta + 1.0;
  const double as = std::abs(s), at = std::abs(t);
  double part_u = std::pow(as, spec_.p) * P_ / spec_.p;
  double part_v = std::pow(at, spec_.q) * Q_ / spec_.q;
  if (df_ > 0.0)
    part_u -= spec_.lambda * std::pow(as, df_) * Af_;
  if (dg_ > 0.0)
    part_v -= spec_.mu * std::pow(at, dg_) * Ag_;
  return a1 * part_u + b1 * part_v - std::pow(as, a1) * std::pow(at, b1) * R_;
}

double SystemFiber::d_s(double s, double t) const {
  const double a1 = spec_.alpha + 1.0, b1 = spec_.beta + 1.0;
  double v = std::pow(s, spec_.p - 1.0) * P_ - std::pow(s, spec_.alpha) * std::pow(t, b1) * R_;
  if (df_ > 0.0)
    v -= spec_.lambda * df_ * std::pow(s, df_ - 1.0) * Af_;
  return a1 * v;
}

double SystemFiber::d_t(double s, double t) const {
  const double a1 = spec_.alpha + 1.0, b1 = spec_.beta + 1.0;
  double v = std::pow(t, spec_.q - 1.0) * Q_ - std::pow(s, a1) * std::pow(t, spec_.beta) * R_;
  if (dg_ > 0.0)
    v -= spec_.mu * dg_ * std::pow(t, dg_ - 1.0) * Ag_;
  return b1 * v;
}

double SystemFiber::relative_d_s(double s, double t) const {
  return d_s(s, t) * s / ((spec_.alpha + 1.0) * std::pow(s, spec_.p) * P_);
}

double SystemFiber::relative_d_t(double s, double t) const {
  return d_t(s, t) * t / ((spec_.beta + 1.0) * std::pow(t, spec_.q) * Q_);
}

std::pair<double, double> system_scalings_00(const ProblemSpec &spec, double P, double Q, double R) {
  r_exponent(spec);
  const double a1 = spec.alpha + 1.0, b1 = spec.beta + 1.0;
  // Work in logarithms: the exponents are large for some admissible specs.
  //   (a1 - p) x + b1 y = ln P - ln R,  a1 x + (b1 - q) y = ln Q - ln R
  const double lp = std::log(P) - std::log(R), lq = std::log(Q) - std::log(R);
  const double det = (a1 - spec.p) * (b1 - spec.q) - a1 * b1;
  const double log_s0 = (lp * (b1 - spec.q) - b1 * lq) / det;
  const double log_t0 = (lq * (a1 - spec.p) - a1 * lp) / det;
  return {std::exp(log_s0), std::exp(log_t0)};
}

namespace {

// Damped Newton for the relative fiber equations in (ln s, ln t).
bool newton_system(const ProblemSpec &spec, double P, double Q, double R, double Af, double Ag, double &x,
                   double &y) {
  const double a1 = spec.alpha + 1.0, b1 = spec.beta + 1.0;
  const double df = spec.perturbation_f.degree(), dg = spec.perturbation_g.degree();
  const double lf = df > 0.0 ? spec.lambda * df * Af : 0.0;
  const double lg = dg > 0.0 ? spec.mu * dg * Ag : 0.0;
  auto residual = [&](double xx, double yy) {
    const double coupling = std::exp(a1 * xx + b1 * yy) * R;
    std::array<double, 2> f{1.0 - coupling * std::exp(-spec.p * xx) / P,
                            1.0 - coupling * std::exp(-spec.q * yy) / Q};
    if (lf != 0.0)
      f[0] -= lf * std::exp((df - spec.p) * xx) / P;
    if (lg != 0.0)
      f[1] -= lg * std::exp((dg - spec.q) * yy) / Q;
    return f;
  };
  auto norm2 = [](const std::array<double, 2> &f) { return f[0] * f[0] + f[1] * f[1]; };

  auto f = residual(x, y);
  for (int it = 0; it < 200; ++it) {
    if (norm2(f) < 1e-30)
      return true;
    const double cu = std::exp(a1 * x + b1 * y - spec.p * x) * R / P;
    const double cv = std::exp(a1 * x + b1 * y - spec.q * y) * R / Q;
    double j11 = -(a1 - spec.p) * cu, j12 = -b1 * cu;
    double j21 = -a1 * cv, j22 = -(b1 - spec.q) * cv;
    if (lf != 0.0)
      j11 -= lf * (df - spec.p) * std::exp((df - spec.p) * x) / P;
    if (lg != 0.0)
      j22 -= lg * (dg - spec.q) * std::exp((dg - spec.q) * y) / Q;
    const double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || det == 0.0)
      return false;
    const double dx = -(j22 * f[0] - j12 * f[1]) / det;
    const double dy = -(-j21 * f[0] + j11 * f[1]) / det;
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const auto trial = residual(x + step * dx, y + step * dy);
      if (std::isfinite(trial[0]) && std::isfinite(trial[1]) && norm2(trial) < norm2(f)) {
        x += step * dx;
        y += step * dy;
        f = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      return norm2(f) < 1e-24;
  }
  return norm2(f) < 1e-24;
}

} // namespace

NehariPoint project_system(const ProblemSpec &spec, const Field &u, const Field &v) {
  require_same_grid(u, v);
  if (u.is_zero() || v.is_zero())
    throw ProjectionError("project_system: both components must be nonzero");
  const SystemFiber fiber(spec, u, v);
  if (!(fiber.R() > 0.0))
    throw ProjectionError("project_system: R(u, v) = 0, the coupling vanishes and the projection is undefined");
  if (!(fiber.P() > 0.0) || !(fiber.Q() > 0.0))
    throw ProjectionError("project_system: degenerate gradient term");

  auto [s0, t0] = system_scalings_00(spec, fiber.P(), fiber.Q(), fiber.R());
  const bool perturbed = (spec.lambda != 0.0 && spec.perturbation_f.degree() > 0.0) ||
                         (spec.mu != 0.0 && spec.perturbation_g.degree() > 0.0);
  if (perturbed) {
    const double Af = primitive_integral(spec.perturbation_f, u);
    const double Ag = primitive_integral(spec.perturbation_g, v);
    double x = std::log(s0), y = std::log(t0);
    // Continuation in (lambda, mu) from the explicit lambda = mu = 0 point.
    bool ok = true;
    constexpr int kStages = 16;
    for (int k = 1; k <= kStages && ok; ++k) {
      ProblemSpec stage = spec;
      stage.lambda = spec.lambda * k / kStages;
      stage.mu = spec.mu * k / kStages;
      ok = newton_system(stage, fiber.P(), fiber.Q(), fiber.R(), Af, Ag, x, y);
    }
    if (!ok)
      throw ProjectionError("project_system: Newton iteration for the perturbed fiber did not converge");
    s0 = std::exp(x);
    t0 = std::exp(y);
  }

  NehariPoint point;
  point.fields.push_back(s0 * u);
  point.fields.push_back(t0 * v);
  point.scalings = {s0, t0};
  point.energy = eval_I(spec, point.fields[0], point.fields[1]);
  point.residuals = {fiber.relative_d_s(s0, t0), fiber.relative_d_t(s0, t0)};
  return point;
}

double k_functional(const ProblemSpec &spec, double P, double Q, double R) {
  if (!(R > 0.0))
    throw ProjectionError("k_functional: R(X, Y) = 0");
  const double r = r_exponent(spec);
  const double a1 = spec.alpha + 1.0, b1 = spec.beta + 1.0;
  const double log_bracket = a1 * std::log(P) + b1 * spec.p / spec.q * std::log(Q) - spec.p * std::log(R);
  return std::exp(log_bracket * r / (a1 * (r - spec.p)));
}

double k_functional(const ProblemSpec &spec, const Field &x, const Field &y) {
  return k_functional(spec, eval_P(spec, x), eval_Q(spec, y), eval_R(spec, x, y));
}

} // namespace nehari
