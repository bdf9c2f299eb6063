#include "nehari/psdiag.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <json.hpp>

namespace nehari {

double brezis_lieb_defect(const Field &u_n, const Field &u, double s) {
  require_same_grid(u_n, u);
  if (!(s > 1.0))
    throw ParameterError("brezis_lieb_defect: exponent must exceed 1");
  return std::abs(power_integral(u_n, s) - power_integral(u_n - u, s) - power_integral(u, s));
}

double gradient_splitting_defect(const Field &u_n, const Field &u, double s) {
  require_same_grid(u_n, u);
  if (!(s > 1.0))
    throw ParameterError("gradient_splitting_defect: exponent must exceed 1");
  return std::abs(gradient_energy(u_n, s) - gradient_energy(u_n - u, s) - gradient_energy(u, s));
}

std::vector<PSMember> build_noncompact_ps(const ProblemSpec &spec, const NehariPoint &base, const BubbleSpec &bubble,
                                          const std::vector<int> &n_list) {
  bubble.validate();
  if (base.fields.empty())
    throw ParameterError("build_noncompact_ps: empty base point");
  if (n_list.empty())
    throw ParameterError("build_noncompact_ps: empty index list");
  for (const Field &f : base.fields)
    if (!f.grid().same_mesh(*bubble.grid))
      throw GridMismatch("build_noncompact_ps: base and bubble grids differ");
  ProblemSpec second = spec;
  second.p = spec.q;
  std::vector<PSMember> out;
  out.reserve(n_list.size());
  for (int n : n_list) {
    PSMember m;
    m.push_back(base.fields[0] + psi_sequence(bubble, spec, n));
    if (base.is_system())
      m.push_back(base.fields[1] + psi_sequence(bubble, second, n));
    out.push_back(std::move(m));
  }
  return out;
}

std::string verdict_name(PSVerdict v) {
  switch (v) {
  case PSVerdict::apparently_compact:
    return "apparently-compact";
  case PSVerdict::concentrating:
    return "concentrating";
  case PSVerdict::inconclusive:
    return "inconclusive";
  }
  return "inconclusive";
}

namespace {

double ratio(double a, double b) { return b > 0.0 ? a / b : 0.0; }

std::vector<Field> component_gradients(const ProblemSpec &spec, const PSMember &m) {
  std::vector<Field> g;
  if (m.size() == 1) {
    g.push_back(j_gradient(spec, m[0]));
  } else {
    SystemGradient sg = i_gradient(spec, m[0], m[1]);
    g.push_back(std::move(sg.du));
    g.push_back(std::move(sg.dv));
  }
  for (Field &f : g)
    f.mutable_values().back() = 0.0;
  return g;
}

} // namespace

PSReport ps_check(const ProblemSpec &spec, const std::vector<PSMember> &sequence, double c_star,
                  const PSOptions &options) {
  if (sequence.empty())
    throw ParameterError("ps_check: empty sequence");
  const std::size_t comps = sequence.front().size();
  if (comps != 1 && comps != 2)
    throw ParameterError("ps_check: members must hold one or two fields");
  for (const PSMember &m : sequence) {
    if (m.size() != comps)
      throw ParameterError("ps_check: members differ in component count");
    for (const Field &f : m)
      require_same_grid(f, sequence.front().front());
  }
  const bool system = comps == 2;
  if (system)
    spec.validate_system();
  else
    spec.validate_scalar();
  const PSMember &limit = options.weak_limit ? *options.weak_limit : sequence.back();
  if (limit.size() != comps)
    throw ParameterError("ps_check: weak-limit candidate has the wrong component count");

  const double exps[2] = {spec.p, spec.q};
  const double crits[2] = {spec.p_star(), spec.q_star()};
  const double ball = options.ball_fraction * sequence.front().front().grid().radius();

  PSReport rep;
  rep.system = system;
  rep.c_star_used = c_star;
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const PSMember &m = sequence[k];
    rep.labels.push_back(k < options.labels.size() ? options.labels[k] : static_cast<int>(k));
    rep.levels.push_back(system ? eval_I(spec, m[0], m[1]) : eval_J(spec, m[0]));
    const auto grads = component_gradients(spec, m);
    double rg = 0.0, rc = 0.0, bl = 0.0, gd = 0.0;
    for (std::size_t c = 0; c < comps; ++c) {
      const double dual = dual_norm_surrogate(grads[c], exps[c]);
      rg += ratio(dual, std::pow(gradient_energy(m[c], exps[c]), 1.0 / exps[c]));
      rc += ratio(dual, std::pow(power_integral(m[c], crits[c]), 1.0 / crits[c]));
      bl += brezis_lieb_defect(m[c], limit[c], crits[c]);
      gd += gradient_splitting_defect(m[c], limit[c], exps[c]);
    }
    rep.residual_grad.push_back(rg);
    rep.residual_crit.push_back(rc);
    rep.bl_defects.push_back(bl);
    rep.gradient_defects.push_back(gd);
    rep.concentration.push_back(concentration_profile(m[0], {ball}, crits[0]).front().second);
    if (k > 0) {
      double diff = 0.0, size = 0.0;
      for (std::size_t c = 0; c < comps; ++c) {
        diff += std::pow(gradient_energy(m[c] - sequence[k - 1][c], exps[c]), 1.0 / exps[c]);
        size += std::max(std::pow(gradient_energy(m[c], exps[c]), 1.0 / exps[c]),
                         std::pow(gradient_energy(sequence[k - 1][c], exps[c]), 1.0 / exps[c]));
      }
      rep.distances.push_back(ratio(diff, size));
    }
  }

  const bool rising = std::is_sorted(rep.concentration.begin(), rep.concentration.end());
  const double level_gap = std::abs(rep.levels.back() - c_star) / std::max(std::abs(c_star), 1e-300);
  const bool concentrating = sequence.size() >= 2 && rising &&
                             rep.concentration.back() > options.concentration_threshold &&
                             level_gap <= options.level_tolerance;
  const bool cauchy = !rep.distances.empty() &&
                      std::is_sorted(rep.distances.rbegin(), rep.distances.rend()) &&
                      rep.distances.back() <= options.cauchy_tolerance;
  if (concentrating)
    rep.verdict = PSVerdict::concentrating;
  else if (cauchy)
    rep.verdict = PSVerdict::apparently_compact;
  return rep;
}

void write_ps_report_json(std::ostream &os, const PSReport &report) {
  nlohmann::ordered_json j;
  j["kind"] = report.system ? "system" : "scalar";
  j["verdict"] = verdict_name(report.verdict);
  j["c_star_used"] = report.c_star_used;
  j["n"] = report.labels;
  j["levels"] = report.levels;
  j["residual_grad"] = report.residual_grad;
  j["residual_crit"] = report.residual_crit;
  j["bl_defects"] = report.bl_defects;
  j["gradient_defects"] = report.gradient_defects;
  j["concentration"] = report.concentration;
  j["distances"] = report.distances;
  os << j.dump(2) << '\n';
}

void write_ps_report_csv(std::ostream &os, const PSReport &report) {
  const auto prec = os.precision();
  os << std::setprecision(17) << "n,level,residual_grad,residual_crit,bl_defect,mass_fraction\n";
  for (std::size_t k = 0; k < report.levels.size(); ++k)
    os << report.labels[k] << ',' << report.levels[k] << ',' << report.residual_grad[k] << ','
       << report.residual_crit[k] << ',' << report.bl_defects[k] << ',' << report.concentration[k] << '\n';
  os.precision(prec);
}

} // namespace nehari
