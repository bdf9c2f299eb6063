#pragma once

#include "nehari/functionals.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nehari {

/// Raised when a bubble core is too narrow for the grid.
class ResolutionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Talenti extremal parameters on a target grid.
struct BubbleSpec {
  double epsilon = 1.0;
  double cutoff_radius = 0.9;
  GridPtr grid;

  void validate() const;
};

/// C_N = (N ((N-p)/(p-1))^{p-1})^{(N-p)/p^2}.
double talenti_constant(int dim, double p);

/// Phi_eps(r) = C_N eps^{(N-p)/p^2} (eps + r^{p/(p-1)})^{(p-N)/p}.
double talenti_profile(double r, double epsilon, int dim, double p);

/// Concentration length of Phi_eps: eps^{(p-1)/p}.
double talenti_core_width(double epsilon, double p);

/// Phi_eps sampled on the bubble grid (no cutoff).
Field talenti_field(const BubbleSpec &bubble, const ProblemSpec &problem);

struct SobolevEstimate {
  double value = 0.0;       ///< grad_norm_p / crit_norm^{p/p*}
  double grad_norm_p = 0.0; ///< ||grad Phi||_p^p
  double crit_norm = 0.0;   ///< ||Phi||_{p*}^{p*}
  double truncation_indicator = 0.0;
  double epsilon = 0.0;
  bool trusted = false;
};

inline constexpr double kTruncationThreshold = 1e-3;

/// Sobolev quotient of the Talenti profile computed by quadrature.
/// truncation_indicator is the largest fraction of either integral carried by
/// the outer 10% radial shell; the estimate is trusted below `threshold`.
SobolevEstimate estimate_sobolev_constant(const BubbleSpec &bubble, const ProblemSpec &problem,
                                          double threshold = kTruncationThreshold);

/// Large graded grid used for Sobolev-constant estimates (R = 1024).
GridPtr sobolev_grid(int dim, int node_count = 4000);

/// Estimate on sobolev_grid at epsilon = 1/16.
SobolevEstimate default_sobolev_estimate(int dim, double p);

/// Quintic smoothstep cutoff: 1 on [0, rho/2], 0 on [rho, inf).
double smooth_cutoff(double r, double rho);

/// Talenti parameter eps_n of the n-th sequence member. The sequence is indexed
/// by concentration length 1/n, i.e. eps_n = n^{-p/(p-1)}.
double psi_epsilon(int n, double p);

/// psi_n = cutoff * Phi_{eps_n} on the bubble grid. Throws ResolutionError
/// when the core width 1/n is below four node spacings at the origin.
Field psi_sequence(const BubbleSpec &bubble, const ProblemSpec &problem, int n);

/// Fraction of int |f|^s inside each ball B_rho.
std::vector<std::pair<double, double>> concentration_profile(const Field &f, const std::vector<double> &radii,
                                                             double s);

/// Norm table of psi_n and extrapolated common limit.
struct EllLimitReport {
  std::vector<int> n;
  std::vector<double> crit_norm; ///< ||psi_n||_{p*}^{p*}
  std::vector<double> grad_norm; ///< ||grad psi_n||_p^p
  std::vector<double> mass_fraction; ///< fraction of |psi_n|^{p*} inside B_{0.1 R}
  double crit_limit = 0.0;
  double grad_limit = 0.0;
  double ell = 0.0; ///< mean of the two extrapolated limits
  double sobolev_constant = 0.0;
  double candidate_s = 0.0;          ///< S_p
  double candidate_s_pow = 0.0;      ///< S_p^{N/p}
  double relative_gap_s = 0.0;       ///< |ell - S_p| / S_p
  double relative_gap_s_pow = 0.0;   ///< |ell - S_p^{N/p}| / S_p^{N/p}
  double limits_agreement = 0.0;     ///< |crit_limit - grad_limit| / ell
  std::string match;                 ///< "S_p", "S_p^(N/p)", "none" or "both"
};

/// Evaluates psi_n for every n (increasing, each twice the previous), and
/// extrapolates both norms by Richardson on the last pair using the leading
/// truncation rates in the core width: (N-p)/(p-1) for the gradient norm and
/// N/(p-1) for the critical norm.
EllLimitReport estimate_ell_limit(const BubbleSpec &bubble, const ProblemSpec &problem, const std::vector<int> &n_list,
                                  double sobolev_constant, double tolerance = 0.01);

void write_ell_report_csv(std::ostream &os, const EllLimitReport &report);

} // namespace nehari
