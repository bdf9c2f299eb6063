#pragma once

#include "nehari/bubbles.hpp"
#include "nehari/nehari.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nehari {

/// | ||u_n||_s^s - ||u_n - u||_s^s - ||u||_s^s |.
double brezis_lieb_defect(const Field &u_n, const Field &u, double s);

/// | ||grad u_n||_s^s - ||grad(u_n - u)||_s^s - ||grad u||_s^s |.
double gradient_splitting_defect(const Field &u_n, const Field &u, double s);

/// One sequence member: {u} for scalar problems, {u, v} for systems.
using PSMember = std::vector<Field>;

/// Members base + psi_n (componentwise for systems) for every n in n_list.
std::vector<PSMember> build_noncompact_ps(const ProblemSpec &spec, const NehariPoint &base, const BubbleSpec &bubble,
                                         const std::vector<int> &n_list);

enum class PSVerdict { apparently_compact, concentrating, inconclusive };

std::string verdict_name(PSVerdict v);

struct PSOptions {
  /// Weak-limit candidate; the final member is used when absent.
  std::optional<PSMember> weak_limit;
  double ball_fraction = 0.1;          ///< concentration ball radius / R
  double concentration_threshold = 0.9;
  double level_tolerance = 0.02;       ///< relative distance to c_star
  double cauchy_tolerance = 1e-2;      ///< relative successive distance
  std::vector<int> labels;             ///< row labels (defaults to 0, 1, ...)
};

struct PSReport {
  std::vector<int> labels;
  std::vector<double> levels;
  std::vector<double> residual_grad; ///< dual residual / ||grad u_n||_p
  std::vector<double> residual_crit; ///< dual residual / ||u_n||_{p*}
  std::vector<double> bl_defects;
  std::vector<double> gradient_defects;
  std::vector<double> concentration; ///< fraction of |u_n|^{p*} inside the ball
  std::vector<double> distances;     ///< relative successive distances, one fewer than members
  PSVerdict verdict = PSVerdict::inconclusive;
  double c_star_used = 0.0;
  bool system = false;
};

/// Energies, derivative residuals, Brézis-Lieb defects and concentration along
/// a sequence, with a verdict:
///   concentrating      : concentration nondecreasing, last above threshold,
///                        last level within tolerance of c_star
///   apparently-compact : successive distances nonincreasing, last below
///                        cauchy tolerance
///   inconclusive       : otherwise
/// The dual residual is dual_norm_surrogate of the nodal derivative with the
/// boundary entry dropped. For systems the two component ratios are summed.
PSReport ps_check(const ProblemSpec &spec, const std::vector<PSMember> &sequence, double c_star,
                  const PSOptions &options = {});

void write_ps_report_json(std::ostream &os, const PSReport &report);

/// Columns n, level, residual_grad, residual_crit, bl_defect, mass_fraction.
void write_ps_report_csv(std::ostream &os, const PSReport &report);

} // namespace nehari
