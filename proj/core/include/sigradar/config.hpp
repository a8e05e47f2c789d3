#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sigradar/portfolio.hpp"
#include "sigradar/radar.hpp"
#include "sigradar/synth.hpp"

namespace sigradar {

/// Flat `key = value` text with dotted keys. `#` starts a comment.
class ConfigFile {
 public:
  ConfigFile() = default;
  static ConfigFile parse(const std::string& text, std::filesystem::path base_dir = {});
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;  // comma-separated
  // Relative paths resolve against the directory holding the config file.
  std::optional<std::filesystem::path> path(const std::string& key) const;
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  /// Throws ValidationError naming any key that was never read.
  void reject_unknown() const;

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_;
  mutable std::set<std::string> used_;
};

struct DataPaths {
  std::filesystem::path returns = "returns.csv";
  std::filesystem::path markets = "markets.csv";
  std::optional<std::filesystem::path> calendar;
  std::optional<std::filesystem::path> caps;
  std::optional<std::filesystem::path> factors;
  std::optional<std::filesystem::path> rf;
};

struct PortfolioParams {
  double fraction = 0.05;
  bool deciles = true;
  Weighting weighting = Weighting::equal;
  double cost_bps = kDefaultCostBps;
  double leverage = 2.0;

  void validate() const;
};

struct TuneParams {
  std::size_t n_tasks = 2000;
  std::size_t trials_per_task = 20;
  std::optional<Quarter> first_quarter;
  std::optional<Quarter> last_quarter;
  std::map<Algorithm, SearchSpace> spaces;  // overrides of the default spaces
};

struct RunConfig {
  DataPaths data;
  RadarConfig radar;
  PortfolioParams portfolio;
  TuneParams tune;
  bool positive_r2_filter = true;
  std::uint64_t seed = 0;
};

RunConfig run_config_from(const ConfigFile& file);
ScenarioSpec scenario_from(const ConfigFile& file);

/// `hp.<algo>.<name> = value` lines readable by run_config_from.
std::string hyperparameter_text(const std::map<Algorithm, Hyperparameters>& chosen);

}  // namespace sigradar
