#include "nehari/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <json.hpp>

namespace nehari {

SeedKind parse_seed_kind(const std::string &name) {
  if (name == "bump")
    return SeedKind::bump;
  if (name == "bubble")
    return SeedKind::bubble;
  if (name == "random")
    return SeedKind::random;
  throw ParameterError("unknown initial field '" + name + "' (expected bump, bubble or random)");
}

std::string seed_kind_name(SeedKind kind) {
  switch (kind) {
  case SeedKind::bump:
    return "bump";
  case SeedKind::bubble:
    return "bubble";
  case SeedKind::random:
    return "random";
  }
  return "bump";
}

void SolveConfig::validate() const {
  if (max_iterations < 0)
    throw ParameterError("SolveConfig: max_iterations must be >= 0");
  if (!(armijo.initial_step > 0.0) || !std::isfinite(armijo.initial_step))
    throw ParameterError("SolveConfig: Armijo initial step must be positive");
  if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0))
    throw ParameterError("SolveConfig: Armijo shrink factor must lie in (0, 1)");
  if (!(armijo.slope_fraction > 0.0 && armijo.slope_fraction < 1.0))
    throw ParameterError("SolveConfig: Armijo slope fraction must lie in (0, 1)");
  if (!(stationarity_tol > 0.0) || !(nehari_tol_scalar > 0.0) || !(nehari_tol_system > 0.0))
    throw ParameterError("SolveConfig: tolerances must be positive");
  if (std::isnan(energy_floor))
    throw ParameterError("SolveConfig: energy floor must be a number");
}

namespace {

// H^1_0 stiffness of the radial P1 space, Dirichlet at r = R.
class Stiffness {
public:
  explicit Stiffness(const RadialGrid &g) : diag_(g.size(), 0.0), off_(g.cell_count(), 0.0) {
    const auto vol = g.shell_volumes();
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      const double k = vol[c] / (g.spacing(c) * g.spacing(c));
      diag_[c] += k;
      diag_[c + 1] += k;
      off_[c] = -k;
    }
  }

  // z with A z = g on interior nodes, z = 0 at the boundary node.
  std::vector<double> solve(std::span<const double> g) const {
    const std::size_t m = diag_.size() - 1;
    std::vector<double> c(m, 0.0), d(m, 0.0), z(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double sub = i > 0 ? off_[i - 1] : 0.0;
      const double denom = diag_[i] - (i > 0 ? sub * c[i - 1] : 0.0);
      c[i] = i + 1 < m ? off_[i] / denom : 0.0;
      d[i] = (g[i] - (i > 0 ? sub * d[i - 1] : 0.0)) / denom;
    }
    for (std::size_t i = m; i-- > 0;)
      z[i] = d[i] - (i + 1 < m ? c[i] * z[i + 1] : 0.0);
    return z;
  }

  double energy(std::span<const double> u) const {
    double s = 0.0;
    for (std::size_t i = 0; i < diag_.size(); ++i)
      s += diag_[i] * u[i] * u[i];
    for (std::size_t c = 0; c < off_.size(); ++c)
      s += 2.0 * off_[c] * u[c] * u[c + 1];
    return s;
  }

private:
  std::vector<double> diag_, off_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

Field bump_field(const GridPtr &grid) {
  const double R = grid->radius();
  return Field::sample(grid, [R](double r) {
    const double x = std::max(0.0, 1.0 - r / R);
    return x * x;
  });
}

Field random_field(const GridPtr &grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(0.1, 1.0);
  double a[4];
  for (double &c : a)
    c = coef(rng);
  const double R = grid->radius();
  return Field::sample(grid, [&](double r) {
    const double x = std::max(0.0, 1.0 - (r / R) * (r / R));
    double v = 0.0, xp = 1.0;
    for (double c : a) {
      xp *= x;
      v += c * xp;
    }
    return v;
  });
}

Field shifted_bubble(const GridPtr &grid, const ProblemSpec &spec, double width) {
  const double eps = std::pow(width, spec.p / (spec.p - 1.0));
  const double edge = talenti_profile(grid->radius(), eps, spec.dim, spec.p);
  return Field::sample(grid, [&](double r) { return talenti_profile(r, eps, spec.dim, spec.p) - edge; });
}

Field bubble_field(const GridPtr &grid, const ProblemSpec &spec, bool system) {
  const double R = grid->radius();
  const double smallest = 4.0 * grid->spacing(0);
  double best_energy = std::numeric_limits<double>::infinity();
  double best_width = R;
  for (double width = R; width >= smallest; width *= std::pow(2.0, -0.25)) {
    const Field u = shifted_bubble(grid, spec, width);
    try {
      const double e = system ? project_system(spec, u, u).energy : project_scalar(spec, u).energy;
      if (e < best_energy) {
        best_energy = e;
        best_width = width;
      }
    } catch (const ProjectionError &) {
    }
  }
  return shifted_bubble(grid, spec, best_width);
}

struct Iterate {
  NehariPoint point;
  std::vector<std::vector<double>> grad; // nodal derivative per component, boundary entry zeroed
};

Iterate scalar_iterate(const ProblemSpec &spec, const Field &u, FiberSelection sel) {
  Iterate it{project_scalar(spec, u, sel), {}};
  Field g = j_gradient(spec, it.point.fields[0]);
  auto v = g.values();
  it.grad.emplace_back(v.begin(), v.end());
  it.grad[0].back() = 0.0;
  return it;
}

Iterate system_iterate(const ProblemSpec &spec, const Field &u, const Field &v) {
  Iterate it{project_system(spec, u, v), {}};
  const SystemGradient g = i_gradient(spec, it.point.fields[0], it.point.fields[1]);
  for (const Field *f : {&g.du, &g.dv}) {
    auto vals = f->values();
    it.grad.emplace_back(vals.begin(), vals.end());
    it.grad.back().back() = 0.0;
  }
  return it;
}

double gradient_scale(const ProblemSpec &spec, const NehariPoint &pt) {
  if (!pt.is_system())
    return eval_P(spec, pt.fields[0]);
  return (spec.alpha + 1.0) * eval_P(spec, pt.fields[0]) + (spec.beta + 1.0) * eval_Q(spec, pt.fields[1]);
}

template <class Project>
SolveResult descend(const ProblemSpec &spec, std::vector<Field> start, const SolveConfig &config, double nehari_tol,
                    Project project) {
  const Stiffness A(start.front().grid());
  SolveResult res;
  Iterate cur = project(start);
  res.energy_history.push_back(cur.point.energy);
  double tau = config.armijo.initial_step;

  auto residual_of = [&](const Iterate &it, std::vector<std::vector<double>> &dirs, double &slope, double &wnorm) {
    dirs.clear();
    slope = 0.0;
    double wa = 0.0;
    for (std::size_t k = 0; k < it.grad.size(); ++k) {
      dirs.push_back(A.solve(it.grad[k]));
      slope += dot(it.grad[k], dirs.back());
      wa += A.energy(it.point.fields[k].values());
    }
    wnorm = std::sqrt(wa);
    const double scale = gradient_scale(spec, it.point);
    return scale > 0.0 ? std::sqrt(std::max(slope, 0.0)) * wnorm / scale : 0.0;
  };

  std::vector<std::vector<double>> dirs;
  double slope = 0.0, wnorm = 0.0;
  res.gradient_residual = residual_of(cur, dirs, slope, wnorm);
  res.status = "max-iterations";

  for (int k = 0; k < config.max_iterations; ++k) {
    if (cur.point.energy < config.energy_floor) {
      res.diverged = true;
      res.status = "diverged";
      break;
    }
    if (res.gradient_residual <= config.stationarity_tol && cur.point.max_residual() <= nehari_tol) {
      res.converged = true;
      res.status = "converged";
      break;
    }
    // Direction normalized to the size of the iterate; tau is a relative step.
    const double dnorm = std::sqrt(slope > 0.0 ? slope : 0.0);
    double dir_a = 0.0;
    for (const auto &d : dirs)
      dir_a += A.energy(d);
    const double scale = dir_a > 0.0 ? wnorm / std::sqrt(dir_a) : 0.0;
    const double rate = slope * scale; // J'(w) applied to the normalized direction
    if (!(rate > 0.0) || dnorm == 0.0) {
      res.status = "stalled";
      break;
    }
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      std::vector<Field> trial;
      for (std::size_t c = 0; c < cur.point.fields.size(); ++c) {
        std::vector<double> v(cur.point.fields[c].values().begin(), cur.point.fields[c].values().end());
        for (std::size_t i = 0; i < v.size(); ++i)
          v[i] -= tau * scale * dirs[c][i];
        v.back() = 0.0;
        trial.emplace_back(cur.point.fields[c].grid_ptr(), std::move(v));
      }
      try {
        Iterate next = project(trial);
        if (next.point.energy <= cur.point.energy - config.armijo.slope_fraction * tau * rate) {
          cur = std::move(next);
          accepted = true;
          break;
        }
      } catch (const ProjectionError &) {
      }
      tau *= config.armijo.shrink;
    }
    if (!accepted) {
      res.status = "line-search-failed";
      break;
    }
    res.iterations = k + 1;
    res.energy_history.push_back(cur.point.energy);
    res.gradient_residual = residual_of(cur, dirs, slope, wnorm);
    tau = std::min(config.armijo.initial_step, 2.0 * tau);
  }
  if (!res.converged && !res.diverged && res.gradient_residual <= config.stationarity_tol &&
      cur.point.max_residual() <= nehari_tol) {
    res.converged = true;
    res.status = "converged";
  }
  if (cur.point.energy < config.energy_floor) {
    res.diverged = true;
    res.converged = false;
    res.status = "diverged";
  }
  res.point = std::move(cur.point);
  return res;
}

} // namespace

Field make_seed(SeedKind kind, const GridPtr &grid, const ProblemSpec &spec, std::uint64_t seed, bool system) {
  if (!grid)
    throw ParameterError("make_seed: missing grid");
  if (grid->dim() != spec.dim)
    throw GridMismatch("make_seed: grid dimension differs from problem dimension");
  switch (kind) {
  case SeedKind::bump:
    return bump_field(grid);
  case SeedKind::bubble:
    return bubble_field(grid, spec, system);
  case SeedKind::random:
    return random_field(grid, seed);
  }
  return bump_field(grid);
}

SolveResult minimize_scalar_nehari(const ProblemSpec &spec, const Field &seed, const SolveConfig &config) {
  spec.validate_scalar();
  config.validate();
  if (seed.grid().dim() != spec.dim)
    throw GridMismatch("minimize_scalar_nehari: grid dimension differs from problem dimension");
  return descend(spec, {seed}, config, config.nehari_tol_scalar,
                 [&](const std::vector<Field> &w) { return scalar_iterate(spec, w[0], config.selection); });
}

SolveResult minimize_scalar_nehari(const ProblemSpec &spec, const GridPtr &grid, const SolveConfig &config) {
  spec.validate_scalar();
  config.validate();
  return minimize_scalar_nehari(spec, make_seed(config.initial_field, grid, spec, config.seed), config);
}

SolveResult minimize_system_nehari(const ProblemSpec &spec, const Field &seed_u, const Field &seed_v,
                                   const SolveConfig &config) {
  spec.validate_system();
  config.validate();
  require_same_grid(seed_u, seed_v);
  if (seed_u.grid().dim() != spec.dim)
    throw GridMismatch("minimize_system_nehari: grid dimension differs from problem dimension");
  auto project = [&](const std::vector<Field> &w) { return system_iterate(spec, w[0], w[1]); };
  try {
    return descend(spec, {seed_u, seed_v}, config, config.nehari_tol_system, project);
  } catch (const ProjectionError &) {
    // Degenerate coupling at the seed: restart from the configured seed pair.
    const GridPtr grid = seed_u.grid_ptr();
    Field u = make_seed(config.initial_field, grid, spec, config.seed, true);
    Field v = config.initial_field == SeedKind::random ? make_seed(SeedKind::random, grid, spec, config.seed + 1) : u;
    SolveResult res = descend(spec, {u, v}, config, config.nehari_tol_system, project);
    res.status += " (reseeded)";
    return res;
  }
}

SolveResult minimize_system_nehari(const ProblemSpec &spec, const GridPtr &grid, const SolveConfig &config) {
  spec.validate_system();
  config.validate();
  Field u = make_seed(config.initial_field, grid, spec, config.seed, true);
  Field v = config.initial_field == SeedKind::random ? make_seed(SeedKind::random, grid, spec, config.seed + 1) : u;
  return minimize_system_nehari(spec, u, v, config);
}

double holder_lower_bound(const ProblemSpec &spec, double sobolev_p, double sobolev_q) {
  spec.validate_system();
  if (!(sobolev_p > 0.0) || !(sobolev_q > 0.0))
    throw ParameterError("holder_lower_bound: Sobolev constants must be positive");
  const double r = r_exponent(spec);
  const double a1 = spec.alpha + 1.0, b1 = spec.beta + 1.0, p = spec.p, q = spec.q;
  const double base = std::log(sobolev_p) + p * b1 / (q * a1) * std::log(sobolev_q);
  return a1 * (1.0 / p - 1.0 / r) * std::exp(r / (r - p) * base);
}

double equal_exponent_level(const ProblemSpec &spec, double sobolev_p) {
  const double n = spec.dim, p = spec.p;
  return p / (n - p) * std::pow(sobolev_p, n / p);
}

double scalar_ground_level(const ProblemSpec &spec, double sobolev_p) {
  const double n = spec.dim;
  return std::pow(sobolev_p, n / spec.p) / n;
}

namespace {

bool scalar_unperturbed(const ProblemSpec &spec) {
  return spec.lambda == 0.0 || spec.perturbation_f.kind == Perturbation::Kind::none;
}

bool system_unperturbed(const ProblemSpec &spec) {
  return (spec.lambda == 0.0 || spec.perturbation_f.kind == Perturbation::Kind::none) &&
         (spec.mu == 0.0 || spec.perturbation_g.kind == Perturbation::Kind::none);
}

// On the Nehari set J_lambda = (1/p - 1/p*) ||u||_{p*}^{p*} + lambda (d/p - 1) int F(u),
// which is >= 0 for lambda >= 0 and degree d >= p. Same per component for systems.
bool nonnegative_on_manifold(double param, const Perturbation &pert, double p) {
  return pert.kind == Perturbation::Kind::none || param == 0.0 || (param > 0.0 && pert.degree() >= p);
}

template <class Run> void fill_second_summand(CriticalLevelReport &rep, Run run) {
  try {
    const SolveResult res = run();
    rep.solver_energy = res.point.energy;
    rep.solver_converged = res.converged;
    if (res.diverged) {
      rep.second_summand = "diverged";
      rep.inf_J_lambda = std::min(0.0, res.point.energy);
    } else {
      rep.second_summand = res.converged ? "solver" : "solver-unconverged";
      rep.inf_J_lambda = std::min(0.0, res.point.energy);
    }
    rep.attained = res.point.energy < 0.0;
  } catch (const ProjectionError &) {
    rep.second_summand = "projection-failed";
    rep.inf_J_lambda = 0.0;
    rep.attained = false;
  }
}

} // namespace

CriticalLevelReport critical_level_scalar(const ProblemSpec &spec, const GridPtr &grid, const SolveConfig &config,
                                          const SobolevEstimate &sobolev, bool with_mesh_diagnostic) {
  spec.validate_scalar();
  config.validate();
  CriticalLevelReport rep;
  rep.sobolev_constant = sobolev.value;
  rep.sobolev_constant_q = sobolev.value;
  rep.inf_J0 = scalar_ground_level(spec, sobolev.value);
  rep.provenance = "bubble-quadrature";
  if (scalar_unperturbed(spec)) {
    rep.second_summand = "zero-attained";
    rep.inf_J_lambda = 0.0;
  } else if (nonnegative_on_manifold(spec.lambda, spec.perturbation_f, spec.p)) {
    rep.second_summand = "zero-sign";
    rep.inf_J_lambda = 0.0;
  } else {
    fill_second_summand(rep, [&] { return minimize_scalar_nehari(spec, grid, config); });
  }
  if (with_mesh_diagnostic) {
    ProblemSpec base = spec;
    base.lambda = 0.0;
    SolveConfig diag = config;
    diag.initial_field = SeedKind::bubble;
    rep.mesh_energy = minimize_scalar_nehari(base, grid, diag).point.energy;
  }
  rep.c_star = rep.inf_J0 + rep.inf_J_lambda;
  return rep;
}

CriticalLevelReport critical_level_system(const ProblemSpec &spec, const GridPtr &grid, const SolveConfig &config,
                                          const SobolevEstimate &sobolev_p, const SobolevEstimate &sobolev_q) {
  spec.validate_system();
  config.validate();
  CriticalLevelReport rep;
  rep.system = true;
  rep.sobolev_constant = sobolev_p.value;
  rep.sobolev_constant_q = sobolev_q.value;
  rep.holder_bound = holder_lower_bound(spec, sobolev_p.value, sobolev_q.value);
  if (spec.p == spec.q) {
    rep.inf_J0 = equal_exponent_level(spec, sobolev_p.value);
    rep.provenance = "equal-exponent-closed-form";
  } else {
    ProblemSpec base = spec;
    base.lambda = 0.0;
    base.mu = 0.0;
    SolveConfig diag = config;
    diag.initial_field = SeedKind::bubble;
    rep.mesh_energy = minimize_system_nehari(base, grid, diag).point.energy;
    rep.inf_J0 = rep.mesh_energy;
    rep.provenance = rep.mesh_energy >= rep.holder_bound ? "mesh-minimization" : "mesh-minimization-below-bound";
  }
  if (system_unperturbed(spec)) {
    rep.second_summand = "zero-attained";
    rep.inf_J_lambda = 0.0;
  } else if (nonnegative_on_manifold(spec.lambda, spec.perturbation_f, spec.p) &&
             nonnegative_on_manifold(spec.mu, spec.perturbation_g, spec.q)) {
    rep.second_summand = "zero-sign";
    rep.inf_J_lambda = 0.0;
  } else {
    fill_second_summand(rep, [&] { return minimize_system_nehari(spec, grid, config); });
  }
  rep.c_star = rep.inf_J0 + rep.inf_J_lambda;
  return rep;
}

void write_critical_level_json(std::ostream &os, const CriticalLevelReport &report) {
  nlohmann::ordered_json j;
  j["kind"] = report.system ? "system" : "scalar";
  j["inf_J0"] = report.inf_J0;
  j["inf_J_lambda"] = report.inf_J_lambda;
  j["c_star"] = report.c_star;
  j["sobolev_constant"] = report.sobolev_constant;
  if (report.system) {
    j["sobolev_constant_q"] = report.sobolev_constant_q;
    j["holder_bound"] = report.holder_bound;
  }
  j["provenance"] = report.provenance;
  j["second_summand"] = report.second_summand;
  j["solver_energy"] = report.solver_energy;
  j["solver_converged"] = report.solver_converged;
  j["attained"] = report.attained;
  j["mesh_energy"] = report.mesh_energy;
  os << j.dump(2) << '\n';
}

} // namespace nehari
