#include "nehari/cli.hpp"

#include "nehari/config.hpp"
#include "nehari/psdiag.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

namespace fs = std::filesystem;

namespace nehari {

namespace {

class OutputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Context {
  ExperimentConfig cfg;
  fs::path dir;
  std::ostream &out;
};

std::ofstream open_output(const Context &ctx, const std::string &name) {
  std::ofstream f(ctx.dir / name, std::ios::binary);
  if (!f)
    throw OutputError("cannot write " + (ctx.dir / name).string());
  f << std::setprecision(17);
  return f;
}

fs::path prepare_dir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw OutputError("output directory '" + dir + "' is not writable");
  const fs::path probe = fs::path(dir) / ".nehari_write_probe";
  {
    std::ofstream f(probe);
    if (!f)
      throw OutputError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

SobolevEstimate sobolev_for(const ExperimentConfig &cfg, double p) {
  ProblemSpec pr;
  pr.dim = cfg.problem.dim;
  pr.p = p;
  BubbleSpec b{1.0 / 16.0, 512.0, sobolev_grid(pr.dim, cfg.bubble.sobolev_nodes)};
  return estimate_sobolev_constant(b, pr);
}

nlohmann::ordered_json solve_json(const SolveResult &r) {
  nlohmann::ordered_json j;
  j["status"] = r.status;
  j["converged"] = r.converged;
  j["diverged"] = r.diverged;
  j["iterations"] = r.iterations;
  j["gradient_residual"] = r.gradient_residual;
  j["energy"] = r.point.energy;
  j["scalings"] = r.point.scalings;
  j["nehari_residuals"] = r.point.residuals;
  j["energy_history"] = r.energy_history;
  return j;
}

void write_json(const Context &ctx, const std::string &name, const nlohmann::ordered_json &j) {
  auto f = open_output(ctx, name);
  f << j.dump(2) << '\n';
}

// -- subcommands ---------------------------------------------------------------

int cmd_ground_state(const Context &ctx) {
  const auto &cfg = ctx.cfg;
  const GridPtr grid = cfg.make_grid();
  const SolveResult r = cfg.system ? minimize_system_nehari(cfg.problem, grid, cfg.solve)
                                   : minimize_scalar_nehari(cfg.problem, grid, cfg.solve);
  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["result"] = solve_json(r);
  write_json(ctx, "ground_state.json", j);
  {
    auto f = open_output(ctx, "ground_state_u.csv");
    write_field_csv(f, r.point.fields[0], "u");
  }
  if (r.point.is_system()) {
    auto f = open_output(ctx, "ground_state_v.csv");
    write_field_csv(f, r.point.fields[1], "v");
  }
  ctx.out << "energy " << r.point.energy << "\nstatus " << r.status << "\niterations " << r.iterations << '\n';
  return r.converged ? kExitOk : kExitNonConvergence;
}

bool second_summand_ok(const CriticalLevelReport &rep) {
  return rep.second_summand == "zero-attained" || rep.second_summand == "zero-sign" || rep.second_summand == "solver" ||
         rep.second_summand == "projection-failed";
}

CriticalLevelReport critical_level(const ExperimentConfig &cfg, const GridPtr &grid, const SobolevEstimate &sp,
                                   const SobolevEstimate &sq, bool diagnostic) {
  return cfg.system ? critical_level_system(cfg.problem, grid, cfg.solve, sp, sq)
                    : critical_level_scalar(cfg.problem, grid, cfg.solve, sp, diagnostic);
}

int cmd_critical_level(const Context &ctx) {
  const auto &cfg = ctx.cfg;
  const SobolevEstimate sp = sobolev_for(cfg, cfg.problem.p);
  const SobolevEstimate sq = cfg.system && cfg.problem.q != cfg.problem.p ? sobolev_for(cfg, cfg.problem.q) : sp;
  const CriticalLevelReport rep = critical_level(cfg, cfg.make_grid(), sp, sq, true);
  {
    auto f = open_output(ctx, "critical_level.json");
    write_critical_level_json(f, rep);
  }
  ctx.out << "inf_J0 " << rep.inf_J0 << "\ninf_J_lambda " << rep.inf_J_lambda << "\nc_star " << rep.c_star
          << "\nprovenance " << rep.provenance << "\nsecond_summand " << rep.second_summand << '\n';
  if (!sp.trusted || !sq.trusted)
    return kExitUntrusted;
  return second_summand_ok(rep) ? kExitOk : kExitNonConvergence;
}

int cmd_sobolev(const Context &ctx) {
  const auto &cfg = ctx.cfg;
  ProblemSpec pr;
  pr.dim = cfg.problem.dim;
  pr.p = cfg.problem.p;
  const GridPtr grid = sobolev_grid(pr.dim, cfg.bubble.sobolev_nodes);
  auto f = open_output(ctx, "sobolev.csv");
  f << "epsilon,value,grad_norm_p,crit_norm,truncation_indicator,trusted\n";
  bool trusted = true;
  double lo = INFINITY, hi = -INFINITY;
  for (double eps : cfg.bubble.epsilons) {
    const SobolevEstimate e = estimate_sobolev_constant(BubbleSpec{eps, 0.5 * grid->radius(), grid}, pr);
    f << eps << ',' << e.value << ',' << e.grad_norm_p << ',' << e.crit_norm << ',' << e.truncation_indicator << ','
      << (e.trusted ? 1 : 0) << '\n';
    ctx.out << "epsilon " << eps << " S_p " << e.value << (e.trusted ? "" : " (untrusted)") << '\n';
    trusted = trusted && e.trusted;
    lo = std::min(lo, e.value);
    hi = std::max(hi, e.value);
  }
  ctx.out << "relative_spread " << (hi - lo) / lo << '\n';
  return trusted ? kExitOk : kExitUntrusted;
}

int cmd_bubble_diag(const Context &ctx) {
  const auto &cfg = ctx.cfg;
  const SobolevEstimate sp = sobolev_for(cfg, cfg.problem.p);
  const BubbleSpec bubble{1.0, cfg.bubble.cutoff_radius, cfg.make_grid()};
  const EllLimitReport rep = estimate_ell_limit(bubble, cfg.problem, cfg.bubble.n_list, sp.value);
  {
    auto f = open_output(ctx, "bubble_diag.csv");
    write_ell_report_csv(f, rep);
  }
  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["crit_limit"] = rep.crit_limit;
  j["grad_limit"] = rep.grad_limit;
  j["ell"] = rep.ell;
  j["limits_agreement"] = rep.limits_agreement;
  j["sobolev_constant"] = rep.sobolev_constant;
  j["candidate_S_p"] = rep.candidate_s;
  j["candidate_S_p_pow_N_over_p"] = rep.candidate_s_pow;
  j["relative_gap_S_p"] = rep.relative_gap_s;
  j["relative_gap_S_p_pow_N_over_p"] = rep.relative_gap_s_pow;
  j["match"] = rep.match;
  write_json(ctx, "bubble_diag.json", j);
  ctx.out << "ell " << rep.ell << "\nmatch " << rep.match << '\n';
  return sp.trusted ? kExitOk : kExitUntrusted;
}

int cmd_ps_demo(const Context &ctx) {
  const auto &cfg = ctx.cfg;
  const GridPtr grid = cfg.make_grid();
  const SobolevEstimate sp = sobolev_for(cfg, cfg.problem.p);
  const SobolevEstimate sq = cfg.system && cfg.problem.q != cfg.problem.p ? sobolev_for(cfg, cfg.problem.q) : sp;
  const CriticalLevelReport level = critical_level(cfg, grid, sp, sq, false);

  // The weak limit of the sequence is the base: the minimizer when the second
  // summand is negative and attained, the zero field otherwise.
  NehariPoint base;
  bool base_ok = true;
  std::string base_status = "zero";
  if (level.attained && level.inf_J_lambda < 0.0) {
    const SolveResult r = cfg.system ? minimize_system_nehari(cfg.problem, grid, cfg.solve)
                                     : minimize_scalar_nehari(cfg.problem, grid, cfg.solve);
    base = r.point;
    base_ok = r.converged;
    base_status = r.status;
  } else {
    base.fields.assign(cfg.system ? 2 : 1, Field(grid));
  }
  const BubbleSpec bubble{1.0, cfg.bubble.cutoff_radius, grid};
  const auto seq = build_noncompact_ps(cfg.problem, base, bubble, cfg.bubble.n_list);
  PSOptions opt;
  opt.weak_limit = base.fields;
  opt.labels = cfg.bubble.n_list;
  const PSReport rep = ps_check(cfg.problem, seq, level.c_star, opt);
  {
    auto f = open_output(ctx, "ps_demo.csv");
    write_ps_report_csv(f, rep);
  }
  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["c_star"] = level.c_star;
  j["inf_J0"] = level.inf_J0;
  j["inf_J_lambda"] = level.inf_J_lambda;
  j["base_energy"] = base.energy;
  j["base_status"] = base_status;
  std::ostringstream os;
  write_ps_report_json(os, rep);
  j["report"] = nlohmann::ordered_json::parse(os.str());
  write_json(ctx, "ps_demo.json", j);
  ctx.out << "c_star " << level.c_star << "\nlast_level " << rep.levels.back() << "\nverdict "
          << verdict_name(rep.verdict) << '\n';
  if (!sp.trusted || !sq.trusted)
    return kExitUntrusted;
  return base_ok && second_summand_ok(level) ? kExitOk : kExitNonConvergence;
}

int cmd_sweep(const Context &ctx) {
  const auto &cfg = ctx.cfg;
  const GridPtr grid = cfg.make_grid();
  const SobolevEstimate sp = sobolev_for(cfg, cfg.problem.p);
  const SobolevEstimate sq = cfg.system && cfg.problem.q != cfg.problem.p ? sobolev_for(cfg, cfg.problem.q) : sp;
  std::vector<std::pair<double, double>> points;
  for (double l : cfg.sweep.lambdas) {
    if (cfg.system)
      for (double m : cfg.sweep.mus)
        points.emplace_back(l, m);
    else
      points.emplace_back(l, 0.0);
  }
  std::vector<CriticalLevelReport> reports(points.size());
  const std::size_t workers = static_cast<std::size_t>(cfg.sweep.workers);
  for (std::size_t start = 0; start < points.size(); start += workers) {
    std::vector<std::future<CriticalLevelReport>> jobs;
    for (std::size_t k = start; k < std::min(points.size(), start + workers); ++k) {
      ExperimentConfig local = cfg;
      local.problem.lambda = points[k].first;
      local.problem.mu = points[k].second;
      local.validate();
      jobs.push_back(std::async(std::launch::async,
                                [local, grid, sp, sq] { return critical_level(local, grid, sp, sq, false); }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k)
      reports[start + k] = jobs[k].get();
  }
  auto f = open_output(ctx, "sweep.csv");
  f << "lambda,mu,inf_J0,inf_J_lambda,c_star,converged\n";
  bool all = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const bool ok = second_summand_ok(reports[k]);
    all = all && ok;
    f << points[k].first << ',' << points[k].second << ',' << reports[k].inf_J0 << ',' << reports[k].inf_J_lambda
      << ',' << reports[k].c_star << ',' << (ok ? 1 : 0) << '\n';
  }
  ctx.out << "points " << points.size() << '\n';
  if (!sp.trusted || !sq.trusted)
    return kExitUntrusted;
  return all ? kExitOk : kExitNonConvergence;
}

struct Check {
  std::string name;
  double value;
  double expected;
};

int cmd_identities(const Context &ctx) {
  const auto &cfg = ctx.cfg;
  const ProblemSpec &s = cfg.problem;
  s.validate_system();
  const double r = r_exponent(s);
  const double a1 = s.alpha + 1.0, b1 = s.beta + 1.0;
  std::vector<Check> checks;
  checks.push_back({"critical condition (alpha+1)/p* + (beta+1)/q*", a1 / s.p_star() + b1 / s.q_star(), 1.0});
  checks.push_back({"(alpha+1)/p + (beta+1)/q - 1 = (alpha+1)(1/p - 1/r)", a1 / s.p + b1 / s.q - 1.0,
                    a1 * (1.0 / s.p - 1.0 / r)});
  if (s.p == s.q) {
    checks.push_back({"(alpha+1)(1/p - 1/r) = p/(N-p)", a1 * (1.0 / s.p - 1.0 / r), s.p / (s.dim - s.p)});
    const SobolevEstimate sp = sobolev_for(cfg, s.p);
    checks.push_back({"holder bound = (p/(N-p)) S_p^(N/p)", holder_lower_bound(s, sp.value, sp.value),
                      equal_exponent_level(s, sp.value)});
  }
  for (double ell : {0.5, 1.0, 7.25})
    checks.push_back({"K(ell, ell, ell) = ell at ell = " + std::to_string(ell), k_functional(s, ell, ell, ell), ell});
  {
    const GridPtr grid = cfg.make_grid();
    const Field u = make_seed(SeedKind::bump, grid, s, cfg.seed);
    const Field v = make_seed(SeedKind::random, grid, s, cfg.seed);
    ProblemSpec s0 = s;
    s0.lambda = s0.mu = 0.0;
    const NehariPoint pt = project_system(s0, u, v);
    checks.push_back({"I00(s0 u, t0 v) = (alpha+1)(1/p - 1/r) K(u, v)", pt.energy,
                      a1 * (1.0 / s.p - 1.0 / r) * k_functional(s0, u, v)});
  }

  auto f = open_output(ctx, "identities.csv");
  f << "check,value,expected,relative_error,status\n";
  ctx.out << std::setprecision(17) << "r = " << r << '\n';
  bool all = true;
  for (const Check &c : checks) {
    const double rel = std::abs(c.value - c.expected) / std::max(std::abs(c.expected), 1e-300);
    const bool pass = rel <= 1e-12;
    all = all && pass;
    f << '"' << c.name << "\"," << c.value << ',' << c.expected << ',' << rel << ',' << (pass ? "PASS" : "FAIL")
      << '\n';
    ctx.out << (pass ? "PASS  " : "FAIL  ") << c.name << "  value " << c.value << "  expected " << c.expected << '\n';
  }
  return all ? kExitOk : kExitValidation;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Nehari-manifold experiments for critical p-Laplacian problems and (p,q) systems"};
  app.require_subcommand(1);

  struct Sub {
    std::string name, help;
    int (*fn)(const Context &);
    std::string config_path{};
    std::vector<std::string> overrides{};
    std::string output_dir{};
    CLI::App *app = nullptr;
  };
  std::vector<Sub> subs = {
      {"ground-state", "Nehari minimization (problem.system selects scalar or pair). Writes ground_state.json and "
                       "ground_state_u.csv / ground_state_v.csv with columns r,u / r,v.",
       cmd_ground_state},
      {"critical-level", "Critical level c* with both summands. Writes critical_level.json.", cmd_critical_level},
      {"sobolev", "Sobolev quotient of the Talenti profile over bubble.epsilons. Writes sobolev.csv with columns "
                  "epsilon,value,grad_norm_p,crit_norm,truncation_indicator,trusted.",
       cmd_sobolev},
      {"bubble-diag", "Norms and concentration of the cutoff bubbles psi_n over bubble.n_list. Writes bubble_diag.csv "
                      "with columns n,crit_norm,grad_norm,mass_fraction and bubble_diag.json.",
       cmd_bubble_diag},
      {"ps-demo", "Non-compact Palais-Smale sequence base + psi_n and its diagnostics. Writes ps_demo.csv with columns "
                  "n,level,residual_grad,residual_crit,bl_defect,mass_fraction and ps_demo.json.",
       cmd_ps_demo},
      {"sweep", "Critical levels over sweep.lambdas (and sweep.mus for systems). Writes sweep.csv with columns "
                "lambda,mu,inf_J0,inf_J_lambda,c_star,converged.",
       cmd_sweep},
      {"identities", "Exponent identities, K collapse and the p = q bound. Writes identities.csv with columns "
                     "check,value,expected,relative_error,status.",
       cmd_identities},
  };
  for (Sub &s : subs) {
    s.app = app.add_subcommand(s.name, s.help);
    s.app->add_option("-c,--config", s.config_path, "JSON config (nested or dotted keys)");
    s.app->add_option("--set", s.overrides, "Override a config key, e.g. --set problem.lambda=1.5")->allow_extra_args(false);
    s.app->add_option("-o,--output-dir", s.output_dir, "Output directory (else output_dir, else $NEHARI_OUTPUT_DIR)");
  }
  app.footer("Exit codes: 0 success, 1 validation error, 2 solver non-convergence, 3 untrusted truncation.");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  for (Sub &s : subs) {
    if (!s.app->parsed())
      continue;
    try {
      ExperimentConfig cfg = load_config(s.name, s.config_path, s.overrides);
      if (!s.output_dir.empty())
        cfg.output_dir = s.output_dir;
      if (s.name == "identities")
        cfg.system = true;
      cfg.validate();
      const Context ctx{cfg, prepare_dir(resolve_output_dir(cfg)), out};
      out << std::setprecision(17);
      return s.fn(ctx);
    } catch (const ProjectionError &e) {
      err << "error: " << e.what() << '\n';
      return kExitNonConvergence;
    } catch (const std::invalid_argument &e) {
      err << "error: " << e.what() << '\n';
    } catch (const ResolutionError &e) {
      err << "error: " << e.what() << '\n';
    } catch (const OutputError &e) {
      err << "error: " << e.what() << '\n';
    } catch (const nlohmann::json::exception &e) {
      err << "error: " << e.what() << '\n';
    }
    return kExitValidation;
  }
  return kExitValidation;
}

} // namespace nehari
