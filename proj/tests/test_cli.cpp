#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nehari/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

using namespace nehari;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string &name) {
  const fs::path d = fs::temp_directory_path() / ("nehari_cli_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const std::vector<std::string> kSmall = {"--set", "grid.nodes=400", "--set", "bubble.sobolev_nodes=2000",
                                         "--set", "solve.max_iterations=40"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string> &tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

} // namespace

TEST_CASE("identities pass and print r") {
  const fs::path d = fresh_dir("identities");
  const Run r = run({"identities", "-o", d.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("r = 18\n") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(slurp(d / "identities.csv").rfind("check,value,expected,relative_error,status\n", 0) == 0);
}

TEST_CASE("inadmissible parameters exit with a validation error naming the condition") {
  const fs::path d = fresh_dir("bad");
  Run r = run({"identities", "-o", d.string(), "--set", "problem.alpha=3"});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("(H2)") != std::string::npos);
  r = run({"ground-state", "-o", d.string(), "--set", "problem.p=3.5"});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("(H1)") != std::string::npos);
  r = run({"ground-state", "-o", d.string(), "--set", "problem.f_kind=power", "--set", "problem.f_exponent=7"});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("growth") != std::string::npos);
  r = run({"ground-state", "-o", d.string(), "--set", "problem.colour=blue"});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("invalid config field 'problem.colour'") != std::string::npos);
  r = run({"no-such-command"});
  CHECK(r.code == kExitValidation);
  r = run({"ground-state", "-o", d.string(), "--set", "solve.initial_field=gaussian"});
  CHECK(r.code == kExitValidation);
}

TEST_CASE("unwritable output directory") {
  const fs::path d = fresh_dir("blocked");
  std::ofstream(d.string()) << "file, not a directory";
  const Run r = run({"identities", "-o", (d / "sub").string()});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("not writable") != std::string::npos);
  fs::remove(d);
}

TEST_CASE("output directory falls back to the environment") {
  const fs::path d = fresh_dir("env");
  fs::create_directories(d);
  ::setenv("NEHARI_OUTPUT_DIR", d.string().c_str(), 1);
  const Run r = run({"identities"});
  ::unsetenv("NEHARI_OUTPUT_DIR");
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(d / "identities.csv"));
}

TEST_CASE("flat and nested config files are equivalent") {
  const fs::path d = fresh_dir("config");
  fs::create_directories(d);
  std::ofstream(d / "nested.json") << R"({"problem": {"lambda": 1.0, "f_kind": "power", "f_exponent": 1.5}})";
  std::ofstream(d / "flat.json") << R"({"problem.lambda": 1.0, "problem.f_kind": "power", "problem.f_exponent": 1.5})";
  const Run a = run(with({"critical-level", "-c", (d / "nested.json").string(), "-o", (d / "a").string()}, kSmall));
  const Run b = run(with({"critical-level", "-c", (d / "flat.json").string(), "-o", (d / "b").string()}, kSmall));
  CHECK(a.code == b.code);
  CHECK(slurp(d / "a" / "critical_level.json") == slurp(d / "b" / "critical_level.json"));
  const auto j = nlohmann::json::parse(slurp(d / "a" / "critical_level.json"));
  CHECK(j["inf_J_lambda"].get<double>() < 0.0);

  std::ofstream(d / "broken.json") << "{ not json";
  const Run c = run({"critical-level", "-c", (d / "broken.json").string(), "-o", (d / "c").string()});
  CHECK(c.code == kExitValidation);
}

TEST_CASE("critical level at lambda = 0") {
  const fs::path d = fresh_dir("critical");
  const Run r = run(with({"critical-level", "-o", d.string()}, kSmall));
  CHECK(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(d / "critical_level.json"));
  CHECK(j["second_summand"] == "zero-attained");
  CHECK(j["inf_J_lambda"].get<double>() == 0.0);
  const double S = j["sobolev_constant"].get<double>();
  CHECK(j["c_star"].get<double>() == doctest::Approx(std::pow(S, 1.5) / 3.0).epsilon(1e-15));
}

TEST_CASE("sweep writes one row per parameter") {
  const fs::path d = fresh_dir("sweep");
  const Run r = run(with({"sweep", "-o", d.string(), "--set", "sweep.lambdas=[0, 0.5, 1.0]", "--set",
                          "problem.f_kind=power", "--set", "problem.f_exponent=1.5"},
                         kSmall));
  CHECK(r.code == kExitOk);
  std::istringstream csv(slurp(d / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "lambda,mu,inf_J0,inf_J_lambda,c_star,converged");
  int rows = 0;
  while (std::getline(csv, line))
    ++rows;
  CHECK(rows == 3);
}

TEST_CASE("every subcommand is byte-for-byte reproducible") {
  const std::vector<std::vector<std::string>> cmds = {
      {"identities"},
      {"sobolev"},
      {"bubble-diag", "--set", "bubble.n_list=[2,4,8]"},
      {"ground-state", "--set", "problem.lambda=1", "--set", "problem.f_kind=power", "--set", "problem.f_exponent=1.5"},
      {"critical-level"},
      {"ps-demo", "--set", "bubble.n_list=[2,4,8]"},
      {"sweep", "--set", "sweep.lambdas=[0,1]"},
  };
  for (const auto &cmd : cmds) {
    const fs::path d1 = fresh_dir(cmd[0] + "_1"), d2 = fresh_dir(cmd[0] + "_2");
    auto args = with(cmd, kSmall);
    const Run a = run(with(args, {"-o", d1.string()}));
    const Run b = run(with(args, {"-o", d2.string()}));
    CAPTURE(cmd[0]);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    std::size_t files = 0;
    for (const auto &e : fs::directory_iterator(d1)) {
      ++files;
      CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
    }
    CHECK(files > 0);
  }
}

TEST_CASE("help exits cleanly") {
  const Run r = run({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("ps-demo") != std::string::npos);
}
