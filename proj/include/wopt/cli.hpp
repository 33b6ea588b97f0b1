#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "wopt/error.hpp"
#include "wopt/grid.hpp"
#include "wopt/optimize.hpp"
#include "wopt/rearrange.hpp"

namespace wopt::cli {

enum ExitCode : int {
  kOk = 0,
  kMalformedConfig = 1,
  kInfeasible = 2,
  kNoConvergence = 3,
  kVerifyFailed = 4,
};

// Schema or syntax problem in a config file (exit 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  bool inject_broken_tie_rule = false;  // test hook for verify
};

struct WeightSpec {
  std::string kind = "constant";  // constant | csv | indicator_disk | random
  double value = 1.0;
  std::filesystem::path path;
  double radius = 0.0;
  double inside = 1.0;
  double outside = -1.0;
  double low = -1.0;
  double high = 1.0;
};

struct Tolerances {
  double eig_residual = 1e-8;
  double integral = 1e-12;  // relative
  double symmetry_defect = 0.02;
};

struct RunConfig {
  std::string task;
  DomainPtr domain;
  WeightSpec weight;
  std::optional<SingleClass> single;
  std::optional<std::pair<ResourceClass, ResourceClass>> classes;
  OptimizeOptions optimize;
  Tolerances tolerances;
  std::filesystem::path out_dir = "wopt_out";
  bool heatmap = false;
  int verify_trials = 200;
  bool inject_broken_tie_rule = false;
};

inline constexpr const char* kTasks[] = {"eig",        "optimize", "optimize2",
                                         "symmetrize", "verify",   "remark"};

// Parses and validates a config.  Syntax errors carry the JSON parser's line
// and column.  Class constants are checked for feasibility here, before any
// computation (Infeasible).  Relative paths resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::string& task,
                       const std::filesystem::path& base_dir,
                       const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::string& task,
                      const Overrides& overrides = {});

ScalarField build_weight(const RunConfig& config);

// Runs the task, writes its artifacts into config.out_dir and returns the
// content of results.json.
nlohmann::json run_task(const RunConfig& config);

// Property suites on the configured instance and on random instances drawn
// from config.optimize.rng_seed.  {"passed": bool, "suites": [...]}.
nlohmann::json verify_suites(const RunConfig& config);

// Full command: load, run, map failures onto exit codes, report on err.
int run_command(const std::string& task, const std::filesystem::path& config_path,
                const Overrides& overrides, std::ostream& err);

// Symmetry defects of a field with respect to the domain's axes; null where
// the domain has no such axis or is not convex along it.
nlohmann::json defects_json(const ScalarField& f);

}  // namespace wopt::cli
