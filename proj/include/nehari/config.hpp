#pragma once

#include "nehari/bubbles.hpp"
#include "nehari/solver.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace nehari {

/// Unknown key, wrong value type or unreadable file.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct GridConfig {
  double radius = 1.0;
  int nodes = 2000;
  double grading = 4.0;
};

struct BubbleConfig {
  double cutoff_radius = 0.9;
  std::vector<int> n_list{2, 4, 8, 16, 32};
  std::vector<double> epsilons{1.0, 0.25, 0.0625};
  int sobolev_nodes = 4000;
};

struct SweepConfig {
  std::vector<double> lambdas{0.0};
  std::vector<double> mus{0.0};
  int workers = 4;
};

struct ExperimentConfig {
  ProblemSpec problem;
  bool system = false;
  GridConfig grid;
  SolveConfig solve;
  BubbleConfig bubble;
  SweepConfig sweep;
  std::string output_dir;
  std::uint64_t seed = 42;

  /// Every check that can fail before computation: problem admissibility
  /// (scalar or system), grid, solver and bubble parameters.
  void validate() const;

  GridPtr make_grid() const;
};

/// Nested objects become dotted keys: {"problem": {"p": 2}} -> "problem.p".
/// Arrays are kept as values.
std::map<std::string, nlohmann::json> flatten_config(const nlohmann::json &j);

/// Parses "a.b=v"; v is read as JSON when possible, else as a string.
std::pair<std::string, nlohmann::json> parse_override(const std::string &text);

/// Built-in defaults of a subcommand as flat keys.
std::map<std::string, nlohmann::json> subcommand_defaults(const std::string &subcommand);

/// Defaults, then file keys, then overrides. Unknown keys raise ConfigError.
ExperimentConfig build_config(const std::string &subcommand, const nlohmann::json &file,
                              const std::vector<std::string> &overrides);

ExperimentConfig load_config(const std::string &subcommand, const std::string &path,
                             const std::vector<std::string> &overrides);

/// Effective configuration as nested JSON.
nlohmann::ordered_json config_to_json(const ExperimentConfig &cfg);

/// config output_dir, else $NEHARI_OUTPUT_DIR, else ".".
std::string resolve_output_dir(const ExperimentConfig &cfg);

} // namespace nehari
