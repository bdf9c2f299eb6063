#include "nehari/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>

namespace nehari {

void ExperimentConfig::validate() const {
  if (system)
    problem.validate_system();
  else
    problem.validate_scalar();
  if (!(grid.radius > 0.0) || !(grid.grading >= 1.0) || grid.nodes < 16)
    throw ParameterError("grid: need radius > 0, grading >= 1 and nodes >= 16");
  solve.validate();
  if (!(bubble.cutoff_radius > 0.0 && bubble.cutoff_radius < grid.radius))
    throw ParameterError("bubble.cutoff_radius must lie in (0, grid.radius)");
  if (bubble.n_list.empty())
    throw ParameterError("bubble.n_list must not be empty");
  for (std::size_t k = 0; k < bubble.n_list.size(); ++k)
    if (bubble.n_list[k] < 1 || (k > 0 && bubble.n_list[k] <= bubble.n_list[k - 1]))
      throw ParameterError("bubble.n_list must hold increasing positive integers");
  for (double e : bubble.epsilons)
    if (!(e > 0.0))
      throw ParameterError("bubble.epsilons must be positive");
  if (bubble.sobolev_nodes < 16)
    throw ParameterError("bubble.sobolev_nodes must be >= 16");
  if (sweep.lambdas.empty() || sweep.mus.empty())
    throw ParameterError("sweep.lambdas and sweep.mus must not be empty");
  if (sweep.workers < 1)
    throw ParameterError("sweep.workers must be >= 1");
}

GridPtr ExperimentConfig::make_grid() const {
  return build_radial_grid(problem.dim, grid.radius, grid.nodes, grid.grading);
}

std::map<std::string, nlohmann::json> flatten_config(const nlohmann::json &j) {
  if (!j.is_object())
    throw ConfigError("configuration must be a JSON object");
  std::map<std::string, nlohmann::json> out;
  std::function<void(const nlohmann::json &, const std::string &)> walk = [&](const nlohmann::json &node,
                                                                              const std::string &prefix) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      if (it->is_object())
        walk(*it, key);
      else
        out[key] = *it;
    }
  };
  walk(j, "");
  return out;
}

std::pair<std::string, nlohmann::json> parse_override(const std::string &text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + text + "' is not of the form key=value");
  const std::string key = text.substr(0, eq), raw = text.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded())
    value = raw;
  return {key, value};
}

std::map<std::string, nlohmann::json> subcommand_defaults(const std::string &subcommand) {
  std::map<std::string, nlohmann::json> d;
  if (subcommand == "ps-demo") {
    d["problem.dim"] = 5;
    d["problem.p"] = 2.0;
    d["problem.q"] = 2.0;
    d["problem.alpha"] = 2.0 / 3.0;
    d["problem.beta"] = 2.0 / 3.0;
    d["problem.lambda"] = 1.0;
    d["problem.f_kind"] = "power";
    d["problem.f_exponent"] = 1.5;
  }
  return d;
}

namespace {

double as_double(const std::string &key, const nlohmann::json &v) {
  if (!v.is_number())
    throw ConfigError("config field '" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const std::string &key, const nlohmann::json &v) {
  if (!v.is_number_integer())
    throw ConfigError("config field '" + key + "' must be an integer");
  return v.get<int>();
}

bool as_bool(const std::string &key, const nlohmann::json &v) {
  if (!v.is_boolean())
    throw ConfigError("config field '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string as_string(const std::string &key, const nlohmann::json &v) {
  if (!v.is_string())
    throw ConfigError("config field '" + key + "' must be a string");
  return v.get<std::string>();
}

template <class T, class Item> std::vector<T> as_list(const std::string &key, const nlohmann::json &v, Item item) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto &e : v)
      out.push_back(item(key, e));
  } else {
    out.push_back(item(key, v));
  }
  return out;
}

FiberSelection parse_selection(const std::string &key, const std::string &s) {
  if (s == "lowest")
    return FiberSelection::lowest_energy;
  if (s == "highest")
    return FiberSelection::highest_energy;
  throw ConfigError("config field '" + key + "' must be 'lowest' or 'highest'");
}

void apply(ExperimentConfig &c, std::string &f_kind, double &f_exp, std::string &g_kind, double &g_exp,
           const std::string &key, const nlohmann::json &v) {
  auto &p = c.problem;
  auto &s = c.solve;
  if (key == "problem.dim")
    p.dim = as_int(key, v);
  else if (key == "problem.p")
    p.p = as_double(key, v);
  else if (key == "problem.q")
    p.q = as_double(key, v);
  else if (key == "problem.alpha")
    p.alpha = as_double(key, v);
  else if (key == "problem.beta")
    p.beta = as_double(key, v);
  else if (key == "problem.lambda")
    p.lambda = as_double(key, v);
  else if (key == "problem.mu")
    p.mu = as_double(key, v);
  else if (key == "problem.f_kind")
    f_kind = as_string(key, v);
  else if (key == "problem.f_exponent")
    f_exp = as_double(key, v);
  else if (key == "problem.g_kind")
    g_kind = as_string(key, v);
  else if (key == "problem.g_exponent")
    g_exp = as_double(key, v);
  else if (key == "problem.system")
    c.system = as_bool(key, v);
  else if (key == "grid.radius")
    c.grid.radius = as_double(key, v);
  else if (key == "grid.nodes")
    c.grid.nodes = as_int(key, v);
  else if (key == "grid.grading")
    c.grid.grading = as_double(key, v);
  else if (key == "solve.max_iterations")
    s.max_iterations = as_int(key, v);
  else if (key == "solve.initial_step")
    s.armijo.initial_step = as_double(key, v);
  else if (key == "solve.shrink")
    s.armijo.shrink = as_double(key, v);
  else if (key == "solve.slope_fraction")
    s.armijo.slope_fraction = as_double(key, v);
  else if (key == "solve.stationarity_tol")
    s.stationarity_tol = as_double(key, v);
  else if (key == "solve.nehari_tol_scalar")
    s.nehari_tol_scalar = as_double(key, v);
  else if (key == "solve.nehari_tol_system")
    s.nehari_tol_system = as_double(key, v);
  else if (key == "solve.initial_field")
    s.initial_field = parse_seed_kind(as_string(key, v));
  else if (key == "solve.energy_floor")
    s.energy_floor = as_double(key, v);
  else if (key == "solve.selection")
    s.selection = parse_selection(key, as_string(key, v));
  else if (key == "bubble.cutoff_radius")
    c.bubble.cutoff_radius = as_double(key, v);
  else if (key == "bubble.n_list")
    c.bubble.n_list = as_list<int>(key, v, as_int);
  else if (key == "bubble.epsilons")
    c.bubble.epsilons = as_list<double>(key, v, as_double);
  else if (key == "bubble.sobolev_nodes")
    c.bubble.sobolev_nodes = as_int(key, v);
  else if (key == "sweep.lambdas")
    c.sweep.lambdas = as_list<double>(key, v, as_double);
  else if (key == "sweep.mus")
    c.sweep.mus = as_list<double>(key, v, as_double);
  else if (key == "sweep.workers")
    c.sweep.workers = as_int(key, v);
  else if (key == "output_dir")
    c.output_dir = as_string(key, v);
  else if (key == "seed") {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("config field 'seed' must be a nonnegative integer");
    c.seed = v.get<std::uint64_t>();
  } else
    throw ConfigError("invalid config field '" + key + "'");
}

} // namespace

ExperimentConfig build_config(const std::string &subcommand, const nlohmann::json &file,
                              const std::vector<std::string> &overrides) {
  std::map<std::string, nlohmann::json> merged = subcommand_defaults(subcommand);
  if (!file.is_null())
    for (auto &[k, v] : flatten_config(file))
      merged[k] = v;
  for (const auto &o : overrides) {
    auto [k, v] = parse_override(o);
    merged[k] = v;
  }
  ExperimentConfig cfg;
  std::string f_kind = "none", g_kind = "none";
  double f_exp = 2.0, g_exp = 2.0;
  for (const auto &[k, v] : merged)
    apply(cfg, f_kind, f_exp, g_kind, g_exp, k, v);
  cfg.problem.perturbation_f = Perturbation::parse(f_kind, f_exp);
  cfg.problem.perturbation_g = Perturbation::parse(g_kind, g_exp);
  cfg.solve.seed = cfg.seed;
  return cfg;
}

ExperimentConfig load_config(const std::string &subcommand, const std::string &path,
                             const std::vector<std::string> &overrides) {
  nlohmann::json file;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in)
      throw ConfigError("cannot read config file '" + path + "'");
    file = nlohmann::json::parse(in, nullptr, false);
    if (file.is_discarded())
      throw ConfigError("config file '" + path + "' is not valid JSON");
  }
  return build_config(subcommand, file, overrides);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig &cfg) {
  const auto &p = cfg.problem;
  const auto &s = cfg.solve;
  nlohmann::ordered_json j;
  j["problem"] = {{"dim", p.dim},
                  {"p", p.p},
                  {"q", p.q},
                  {"alpha", p.alpha},
                  {"beta", p.beta},
                  {"lambda", p.lambda},
                  {"mu", p.mu},
                  {"f_kind", p.perturbation_f.name()},
                  {"f_exponent", p.perturbation_f.exponent},
                  {"g_kind", p.perturbation_g.name()},
                  {"g_exponent", p.perturbation_g.exponent},
                  {"system", cfg.system}};
  j["grid"] = {{"radius", cfg.grid.radius}, {"nodes", cfg.grid.nodes}, {"grading", cfg.grid.grading}};
  j["solve"] = {{"max_iterations", s.max_iterations},
                {"initial_step", s.armijo.initial_step},
                {"shrink", s.armijo.shrink},
                {"slope_fraction", s.armijo.slope_fraction},
                {"stationarity_tol", s.stationarity_tol},
                {"nehari_tol_scalar", s.nehari_tol_scalar},
                {"nehari_tol_system", s.nehari_tol_system},
                {"initial_field", seed_kind_name(s.initial_field)},
                {"energy_floor", s.energy_floor},
                {"selection", s.selection == FiberSelection::lowest_energy ? "lowest" : "highest"}};
  j["bubble"] = {{"cutoff_radius", cfg.bubble.cutoff_radius},
                 {"n_list", cfg.bubble.n_list},
                 {"epsilons", cfg.bubble.epsilons},
                 {"sobolev_nodes", cfg.bubble.sobolev_nodes}};
  j["sweep"] = {{"lambdas", cfg.sweep.lambdas}, {"mus", cfg.sweep.mus}, {"workers", cfg.sweep.workers}};
  j["seed"] = cfg.seed;
  return j;
}

std::string resolve_output_dir(const ExperimentConfig &cfg) {
  if (!cfg.output_dir.empty())
    return cfg.output_dir;
  if (const char *env = std::getenv("NEHARI_OUTPUT_DIR"); env && *env)
    return env;
  return ".";
}

} // namespace nehari
