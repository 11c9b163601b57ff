#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace cmfrac::cli {

// Malformed or out-of-range configuration; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  bool full_resolution = false;
};

enum ExitCode { kSuccess = 0, kModelFailure = 1, kConfigFailure = 2 };

nlohmann::json load_config(const std::filesystem::path& path);

// Runs one experiment of the given kind ("weights", "ode", "envelope",
// "pde", "report") and writes its artifacts and report.json into
// opts.out_dir. Throws ConfigError for bad configs; other exceptions are
// model failures.
nlohmann::json run_experiment(const std::string& kind, const nlohmann::json& config,
                              const RunOptions& opts);

// Full command behaviour: runs, writes report.json (also on model failure),
// timing.json, and returns the exit status. Messages go to stderr.
int run_command(const std::string& kind, const std::filesystem::path& config_path,
                const RunOptions& opts);

}  // namespace cmfrac::cli
