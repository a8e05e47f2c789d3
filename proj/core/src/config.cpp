#include "sigradar/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sigradar/error.hpp"
#include "sigradar/io.hpp"

namespace sigradar {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, std::filesystem::path base_dir) {
  ConfigFile cfg;
  cfg.base_ = std::move(base_dir);
  std::istringstream is(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError("config line " + std::to_string(n) + ": empty key");
    if (cfg.values_.count(key)) throw ValidationError("config line " + std::to_string(n) + ": duplicate key " + key);
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw MissingInputError("missing config file: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path.parent_path());
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  used_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string ConfigFile::text(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double ConfigFile::number(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size()) throw ValidationError(key + ": not a number: '" + *v + "'");
  return out;
}

long long ConfigFile::integer(const std::string& key, long long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  long long out = 0;
  const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size()) throw ValidationError(key + ": not an integer: '" + *v + "'");
  return out;
}

bool ConfigFile::flag(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ValidationError(key + ": expected true or false");
}

std::vector<double> ConfigFile::numbers(const std::string& key) const {
  std::vector<double> out;
  const auto v = get(key);
  if (!v) return out;
  std::istringstream is(*v);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    cell = trim(cell);
    double x = 0.0;
    const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
    if (cell.empty() || ec != std::errc() || p != cell.data() + cell.size()) {
      throw ValidationError(key + ": not a number list: '" + *v + "'");
    }
    out.push_back(x);
  }
  return out;
}

std::optional<std::filesystem::path> ConfigFile::path(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::filesystem::path p(*v);
  if (p.is_relative() && !base_.empty()) p = base_ / p;
  return p;
}

std::vector<std::string> ConfigFile::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  }
  return out;
}

void ConfigFile::reject_unknown() const {
  for (const auto& [k, v] : values_) {
    if (used_.count(k) == 0) throw ValidationError("unknown config key: " + k);
  }
}

void PortfolioParams::validate() const {
  if (!(fraction > 0.0 && fraction <= 0.5)) throw ValidationError("portfolio.fraction must be in (0, 0.5]");
  if (!(cost_bps >= 0.0)) throw ValidationError("portfolio.cost_bps must be >= 0");
  if (!(leverage > 0.0)) throw ValidationError("portfolio.leverage must be > 0");
}

namespace {

std::optional<Quarter> quarter_key(const ConfigFile& f, const std::string& key) {
  const auto v = f.get(key);
  if (!v) return std::nullopt;
  return Quarter::parse(*v);
}

std::size_t count_key(const ConfigFile& f, const std::string& key, std::size_t fallback) {
  const long long v = f.integer(key, static_cast<long long>(fallback));
  if (v < 0) throw ValidationError(key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

const std::vector<Algorithm> kAllAlgorithms{Algorithm::ols, Algorithm::lasso, Algorithm::elastic_net,
                                            Algorithm::random_forest, Algorithm::gradient_boosting,
                                            Algorithm::neural_net};

}  // namespace

RunConfig run_config_from(const ConfigFile& f) {
  RunConfig rc;
  rc.seed = static_cast<std::uint64_t>(f.integer("seed", 0));

  if (auto p = f.path("data.returns")) rc.data.returns = *p;
  if (auto p = f.path("data.markets")) rc.data.markets = *p;
  rc.data.calendar = f.path("data.calendar");
  rc.data.caps = f.path("data.caps");
  rc.data.factors = f.path("data.factors");
  rc.data.rf = f.path("data.rf");

  RadarConfig& r = rc.radar;
  if (auto v = f.get("radar.algorithms")) r.algorithms = parse_algorithm_list(*v);
  r.lags = static_cast<int>(f.integer("radar.lags", r.lags));
  r.window_quarters = static_cast<int>(f.integer("radar.window_quarters", r.window_quarters));
  r.min_train_rows = count_key(f, "radar.min_train_rows", r.min_train_rows);
  r.compute_importance = f.flag("radar.importance", r.compute_importance);
  r.importance.background_cap = count_key(f, "radar.importance.background_cap", r.importance.background_cap);
  r.importance.sampled_background_cap =
      count_key(f, "radar.importance.sampled_background_cap", r.importance.sampled_background_cap);
  r.importance.permutations = static_cast<int>(f.integer("radar.importance.permutations", r.importance.permutations));
  r.first_forecast_quarter = quarter_key(f, "radar.first_forecast_quarter");
  r.last_forecast_quarter = quarter_key(f, "radar.last_forecast_quarter");
  const long long threads = f.integer("radar.threads", 1);
  if (threads < 1) throw ValidationError("radar.threads must be >= 1");
  r.threads = static_cast<unsigned>(threads);
  r.seed = rc.seed;

  for (Algorithm a : kAllAlgorithms) {
    const std::string prefix = "hp." + std::string(to_string(a)) + ".";
    const auto keys = f.keys_with_prefix(prefix);
    if (keys.empty()) continue;
    auto values = hyperparameter_values(default_hyperparameters(a));
    for (const auto& k : keys) {
      const std::string name = k.substr(prefix.size());
      if (values.count(name) == 0) throw ValidationError("unknown hyperparameter " + k);
      values[name] = f.number(k, 0.0);
    }
    r.hyperparameters[a] = hyperparameters_from(a, values);
  }
  r.validate();

  PortfolioParams& pp = rc.portfolio;
  pp.fraction = f.number("portfolio.fraction", pp.fraction);
  pp.deciles = f.flag("portfolio.deciles", pp.deciles);
  const std::string w = f.text("portfolio.weighting", "equal");
  if (w == "equal") {
    pp.weighting = Weighting::equal;
  } else if (w == "value") {
    pp.weighting = Weighting::value;
  } else {
    throw ValidationError("portfolio.weighting must be equal or value");
  }
  pp.cost_bps = f.number("portfolio.cost_bps", pp.cost_bps);
  pp.leverage = f.number("portfolio.leverage", pp.leverage);
  pp.validate();
  if (pp.weighting == Weighting::value && !rc.data.caps) {
    throw ValidationError("portfolio.weighting = value needs data.caps");
  }

  TuneParams& t = rc.tune;
  t.n_tasks = count_key(f, "tune.n_tasks", t.n_tasks);
  t.trials_per_task = count_key(f, "tune.trials_per_task", t.trials_per_task);
  t.first_quarter = quarter_key(f, "tune.first_quarter");
  t.last_quarter = quarter_key(f, "tune.last_quarter");
  for (Algorithm a : kAllAlgorithms) {
    const std::string prefix = "tune.space." + std::string(to_string(a)) + ".";
    const auto keys = f.keys_with_prefix(prefix);
    if (keys.empty()) continue;
    const SearchSpace defaults = default_search_space(a);
    SearchSpace space;
    for (const auto& k : keys) {
      const std::string name = k.substr(prefix.size());
      if (defaults.count(name) == 0) throw ValidationError("unknown search dimension " + k);
      space[name] = f.numbers(k);
      if (space[name].empty()) throw ValidationError(k + " has no candidates");
    }
    t.spaces[a] = std::move(space);
  }

  rc.positive_r2_filter = f.flag("report.positive_r2_only", rc.positive_r2_filter);
  return rc;
}

ScenarioSpec scenario_from(const ConfigFile& f) {
  ScenarioSpec s;
  s.seed = static_cast<std::uint64_t>(f.integer("seed", static_cast<long long>(s.seed)));
  s.n_assets = static_cast<int>(f.integer("synth.n_assets", s.n_assets));
  s.n_markets = static_cast<int>(f.integer("synth.n_markets", s.n_markets));
  s.days_per_quarter = static_cast<int>(f.integer("synth.days_per_quarter", s.days_per_quarter));
  s.n_quarters = static_cast<int>(f.integer("synth.n_quarters", s.n_quarters));
  if (auto q = quarter_key(f, "synth.start")) s.start = *q;
  s.exposed_fraction = f.number("synth.exposed_fraction", s.exposed_fraction);
  s.lags = static_cast<int>(f.integer("synth.lags", s.lags));
  const std::string decay = f.text("synth.decay", "geometric");
  if (decay == "geometric") {
    s.profile = decay_profile(DecayKind::geometric, s.lags, f.number("synth.decay_rho", 0.5));
  } else if (decay == "linear") {
    s.profile = decay_profile(DecayKind::linear, s.lags);
  } else if (decay == "custom") {
    s.profile = decay_profile(DecayKind::custom, s.lags, 0.0, f.numbers("synth.decay_weights"));
  } else {
    throw ValidationError("synth.decay must be geometric, linear or custom");
  }
  s.markets_per_asset = static_cast<int>(f.integer("synth.markets_per_asset", s.markets_per_asset));
  s.loading_min = f.number("synth.loading_min", s.loading_min);
  s.loading_max = f.number("synth.loading_max", std::max(s.loading_min, s.loading_max));
  s.positive_loadings = f.flag("synth.positive_loadings", s.positive_loadings);
  s.interaction = f.number("synth.interaction", s.interaction);
  s.market_sd = f.number("synth.market_sd", s.market_sd);
  s.noise_sd = f.number("synth.noise_sd", s.noise_sd);
  s.beta = f.number("synth.beta", s.beta);
  s.factor_sd = f.number("synth.factor_sd", s.factor_sd);
  s.rf_daily = f.number("synth.rf_daily", s.rf_daily);
  for (const auto& k : f.keys_with_prefix("synth.regime.")) {
    const std::string off = k.substr(std::string("synth.regime.").size());
    int q = 0;
    const auto [p, ec] = std::from_chars(off.data(), off.data() + off.size(), q);
    if (ec != std::errc() || p != off.data() + off.size()) throw ValidationError(k + ": expected synth.regime.<quarter offset>");
    s.regime_breaks[q] = f.number(k, 1.0);
  }
  s.validate();
  return s;
}

std::string hyperparameter_text(const std::map<Algorithm, Hyperparameters>& chosen) {
  std::ostringstream os;
  for (const auto& [a, hp] : chosen) {
    for (const auto& [name, v] : hyperparameter_values(hp)) {
      os << "hp." << to_string(a) << "." << name << " = " << io::format_double(v) << "\n";
    }
  }
  return os.str();
}

}  // namespace sigradar
