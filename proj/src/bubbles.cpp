#include "nehari/bubbles.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace nehari {

void BubbleSpec::validate() const {
  if (!grid)
    throw ParameterError("BubbleSpec: missing grid");
  if (!std::isfinite(epsilon) || !(epsilon > 0.0))
    throw ParameterError("BubbleSpec: epsilon must be positive");
  if (!std::isfinite(cutoff_radius) || !(cutoff_radius > 0.0) || !(cutoff_radius < grid->radius()))
    throw ParameterError("BubbleSpec: cutoff radius must lie in (0, R)");
}

double talenti_constant(int dim, double p) {
  const double n = dim;
  return std::pow(n * std::pow((n - p) / (p - 1.0), p - 1.0), (n - p) / (p * p));
}

double talenti_profile(double r, double epsilon, int dim, double p) {
  const double n = dim;
  return talenti_constant(dim, p) * std::pow(epsilon, (n - p) / (p * p)) *
         std::pow(epsilon + std::pow(r, p / (p - 1.0)), (p - n) / p);
}

double talenti_core_width(double epsilon, double p) { return std::pow(epsilon, (p - 1.0) / p); }

Field talenti_field(const BubbleSpec &bubble, const ProblemSpec &problem) {
  if (!bubble.grid)
    throw ParameterError("talenti_field: missing grid");
  if (bubble.grid->dim() != problem.dim)
    throw GridMismatch("talenti_field: grid dimension differs from problem dimension");
  return Field::sample(bubble.grid,
                       [&](double r) { return talenti_profile(r, bubble.epsilon, problem.dim, problem.p); });
}

SobolevEstimate estimate_sobolev_constant(const BubbleSpec &bubble, const ProblemSpec &problem, double threshold) {
  problem.validate_scalar();
  const Field phi = talenti_field(bubble, problem);
  const RadialGrid &g = phi.grid();
  const double p = problem.p, ps = problem.p_star();

  SobolevEstimate est;
  est.epsilon = bubble.epsilon;
  est.grad_norm_p = gradient_energy(phi, p);
  est.crit_norm = power_integral(phi, ps);
  est.value = est.grad_norm_p / std::pow(est.crit_norm, p / ps);

  const double shell = 0.9 * g.radius();
  double grad_outer = 0.0;
  const auto vol = g.shell_volumes();
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (g.node(c) >= shell)
      grad_outer += std::pow(std::abs((phi[c + 1] - phi[c]) / g.spacing(c)), p) * vol[c];
  }
  std::vector<double> dens(phi.size());
  for (std::size_t i = 0; i < dens.size(); ++i)
    dens[i] = std::pow(std::abs(phi[i]), ps);
  const Field density(phi.grid_ptr(), std::move(dens));
  const double crit_outer = est.crit_norm - integrate_ball(density, shell);
  est.truncation_indicator = std::max(grad_outer / est.grad_norm_p, crit_outer / est.crit_norm);
  est.trusted = est.truncation_indicator < threshold;
  return est;
}

GridPtr sobolev_grid(int dim, int node_count) { return build_radial_grid(dim, 1024.0, node_count, 2000.0); }

SobolevEstimate default_sobolev_estimate(int dim, double p) {
  ProblemSpec problem;
  problem.dim = dim;
  problem.p = p;
  BubbleSpec bubble{1.0 / 16.0, 512.0, sobolev_grid(dim)};
  return estimate_sobolev_constant(bubble, problem);
}

double smooth_cutoff(double r, double rho) {
  const double a = 0.5 * rho;
  if (r <= a)
    return 1.0;
  if (r >= rho)
    return 0.0;
  const double x = (r - a) / (rho - a);
  // 1 - (6x^5 - 15x^4 + 10x^3)
  return 1.0 - x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

double psi_epsilon(int n, double p) { return std::pow(static_cast<double>(n), -p / (p - 1.0)); }

Field psi_sequence(const BubbleSpec &bubble, const ProblemSpec &problem, int n) {
  bubble.validate();
  if (n < 1)
    throw ParameterError("psi_sequence: n must be >= 1");
  if (bubble.grid->dim() != problem.dim)
    throw GridMismatch("psi_sequence: grid dimension differs from problem dimension");
  const double core = 1.0 / n;
  const double h0 = bubble.grid->spacing(0);
  if (core < 4.0 * h0) {
    std::ostringstream msg;
    msg << std::setprecision(6) << "psi_sequence: core width 1/n = " << core << " is below 4 node spacings at the origin ("
        << h0 << "); a node spacing <= " << core / 4.0 << " is required";
    throw ResolutionError(msg.str());
  }
  const double eps = psi_epsilon(n, problem.p);
  return Field::sample(bubble.grid, [&](double r) {
    const double c = smooth_cutoff(r, bubble.cutoff_radius);
    return c == 0.0 ? 0.0 : c * talenti_profile(r, eps, problem.dim, problem.p);
  });
}

std::vector<std::pair<double, double>> concentration_profile(const Field &f, const std::vector<double> &radii,
                                                             double s) {
  std::vector<double> dens(f.size());
  for (std::size_t i = 0; i < dens.size(); ++i)
    dens[i] = std::pow(std::abs(f[i]), s);
  const Field density(f.grid_ptr(), std::move(dens));
  const double total = integrate(density);
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double rho : radii) {
    if (rho < 0.0 || rho > f.grid().radius())
      throw ParameterError("concentration_profile: radius outside the grid");
    out.emplace_back(rho, total > 0.0 ? integrate_ball(density, rho) / total : 0.0);
  }
  return out;
}

namespace {

double richardson(double coarse, double fine, double ratio, double rate) {
  const double k = std::pow(ratio, rate);
  return (k * fine - coarse) / (k - 1.0);
}

} // namespace

EllLimitReport estimate_ell_limit(const BubbleSpec &bubble, const ProblemSpec &problem, const std::vector<int> &n_list,
                                  double sobolev_constant, double tolerance) {
  if (n_list.size() < 2)
    throw ParameterError("estimate_ell_limit: need at least two sequence indices");
  for (std::size_t k = 1; k < n_list.size(); ++k)
    if (n_list[k] <= n_list[k - 1])
      throw ParameterError("estimate_ell_limit: indices must increase");
  problem.validate_scalar();
  const double p = problem.p, ps = problem.p_star(), dim = problem.dim;

  EllLimitReport rep;
  rep.n = n_list;
  const double inner = 0.1 * bubble.grid->radius();
  for (int n : n_list) {
    const Field psi = psi_sequence(bubble, problem, n);
    rep.crit_norm.push_back(power_integral(psi, ps));
    rep.grad_norm.push_back(gradient_energy(psi, p));
    rep.mass_fraction.push_back(concentration_profile(psi, {inner}, ps).front().second);
  }
  const std::size_t m = n_list.size();
  const double ratio = static_cast<double>(n_list[m - 1]) / n_list[m - 2];
  rep.grad_limit = richardson(rep.grad_norm[m - 2], rep.grad_norm[m - 1], ratio, (dim - p) / (p - 1.0));
  rep.crit_limit = richardson(rep.crit_norm[m - 2], rep.crit_norm[m - 1], ratio, dim / (p - 1.0));
  rep.ell = 0.5 * (rep.grad_limit + rep.crit_limit);
  rep.limits_agreement = std::abs(rep.grad_limit - rep.crit_limit) / rep.ell;

  rep.sobolev_constant = sobolev_constant;
  rep.candidate_s = sobolev_constant;
  rep.candidate_s_pow = std::pow(sobolev_constant, dim / p);
  rep.relative_gap_s = std::abs(rep.ell - rep.candidate_s) / rep.candidate_s;
  rep.relative_gap_s_pow = std::abs(rep.ell - rep.candidate_s_pow) / rep.candidate_s_pow;
  const bool m1 = rep.relative_gap_s <= tolerance, m2 = rep.relative_gap_s_pow <= tolerance;
  rep.match = m1 && m2 ? "both" : m1 ? "S_p" : m2 ? "S_p^(N/p)" : "none";
  return rep;
}

void write_ell_report_csv(std::ostream &os, const EllLimitReport &report) {
  const auto prec = os.precision();
  os << std::setprecision(17) << "n,crit_norm,grad_norm,mass_fraction\n";
  for (std::size_t k = 0; k < report.n.size(); ++k)
    os << report.n[k] << ',' << report.crit_norm[k] << ',' << report.grad_norm[k] << ',' << report.mass_fraction[k]
       << '\n';
  os.precision(prec);
}

} // namespace nehari
