#pragma once

#include "nehari/bubbles.hpp"
#include "nehari/nehari.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nehari {

struct ArmijoRule {
  double initial_step = 1.0;
  double shrink = 0.5;
  double slope_fraction = 1e-4;
};

enum class SeedKind { bump, bubble, random };

SeedKind parse_seed_kind(const std::string &name);
std::string seed_kind_name(SeedKind kind);

struct SolveConfig {
  int max_iterations = 200;
  ArmijoRule armijo{};
  /// Relative H^{-1} norm of the derivative at which descent stops.
  double stationarity_tol = 1e-6;
  double nehari_tol_scalar = 1e-8;
  double nehari_tol_system = 1e-6;
  SeedKind initial_field = SeedKind::bump;
  std::uint64_t seed = 42;
  /// Energies below this value are reported as divergence.
  double energy_floor = -1e8;
  FiberSelection selection = FiberSelection::lowest_energy;

  void validate() const;
};

/// Initial field on `grid` vanishing at r = R.
///   bump   : (1 - r/R)^2
///   bubble : Phi_eps(r) - Phi_eps(R), scale picked by a scan of the projected
///            energy (scalar: J_lambda, system: I_{lambda,mu} on (u, u))
///   random : positive smooth combination of (1 - (r/R)^2)^k with PRNG `seed`
Field make_seed(SeedKind kind, const GridPtr &grid, const ProblemSpec &spec, std::uint64_t seed, bool system = false);

struct SolveResult {
  NehariPoint point;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  /// Relative H^{-1} norm of the derivative at the returned point.
  double gradient_residual = 0.0;
  std::vector<double> energy_history;
  std::string status;
};

/// Projected descent on N_{J_lambda}: project, take an Armijo step along the
/// H^1_0-preconditioned residual field, re-project. Returns the best point.
SolveResult minimize_scalar_nehari(const ProblemSpec &spec, const GridPtr &grid, const SolveConfig &config);

/// Same scheme for (u, v) on N_{lambda,mu}.
SolveResult minimize_system_nehari(const ProblemSpec &spec, const GridPtr &grid, const SolveConfig &config);

/// Variant seeded by explicit fields (u, or u and v).
SolveResult minimize_scalar_nehari(const ProblemSpec &spec, const Field &seed, const SolveConfig &config);
SolveResult minimize_system_nehari(const ProblemSpec &spec, const Field &seed_u, const Field &seed_v,
                                   const SolveConfig &config);

/// (alpha+1)(1/p - 1/r) [S_p S_q^{p(beta+1)/(q(alpha+1))}]^{r/(r-p)}.
double holder_lower_bound(const ProblemSpec &spec, double sobolev_p, double sobolev_q);

/// (p/(N-p)) S_p^{N/p}: the p = q value of inf I_{0,0}.
double equal_exponent_level(const ProblemSpec &spec, double sobolev_p);

/// (1/N) S_p^{N/p}: inf J_0 over N_{J_0}.
double scalar_ground_level(const ProblemSpec &spec, double sobolev_p);

struct CriticalLevelReport {
  double inf_J0 = 0.0;        ///< first summand
  double inf_J_lambda = 0.0;  ///< second summand, never above 0
  double c_star = 0.0;        ///< inf_J0 + inf_J_lambda as stored
  double sobolev_constant = 0.0;
  double sobolev_constant_q = 0.0;
  std::string provenance;     ///< route that produced inf_J0
  /// "zero-attained" (unperturbed), "zero-sign" (energy >= 0 on the Nehari set
  /// by the sign of the perturbation term), "solver", "solver-unconverged",
  /// "diverged" or "projection-failed"
  std::string second_summand;
  double solver_energy = 0.0; ///< best Nehari energy found for (lambda, mu)
  bool solver_converged = false;
  bool attained = false;      ///< second summand attained by a nonzero Nehari point
  double holder_bound = 0.0;  ///< systems only
  double mesh_energy = 0.0;   ///< mesh minimization of the unperturbed problem (upper-bound diagnostic)
  bool system = false;
};

/// c*(lambda) = inf_{N_{J_0}} J_0 + inf_{N_{J_lambda} cup {0}} J_lambda with the
/// first summand from the Sobolev constant.
CriticalLevelReport critical_level_scalar(const ProblemSpec &spec, const GridPtr &grid, const SolveConfig &config,
                                          const SobolevEstimate &sobolev, bool with_mesh_diagnostic = false);

/// c*(lambda, mu) for the system. p = q: first summand from the closed-form
/// value; otherwise from mesh minimization at lambda = mu = 0 with the Hölder
/// bound reported alongside.
CriticalLevelReport critical_level_system(const ProblemSpec &spec, const GridPtr &grid, const SolveConfig &config,
                                          const SobolevEstimate &sobolev_p, const SobolevEstimate &sobolev_q);

void write_critical_level_json(std::ostream &os, const CriticalLevelReport &report);

} // namespace nehari
