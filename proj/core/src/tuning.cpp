#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sigradar/error.hpp"
#include "sigradar/radar.hpp"
#include "sigradar/rng.hpp"

namespace sigradar {

namespace {

bool integer_dimension(const std::string& name) {
  static const std::set<std::string> names{"n_estimators", "max_depth",  "min_samples_leaf", "epochs",
                                           "batch_size",   "n_layers",   "n_neurons"};
  return names.count(name) != 0;
}

double get(const std::map<std::string, double>& v, const std::string& key, double fallback) {
  auto it = v.find(key);
  return it == v.end() ? fallback : it->second;
}

int get_int(const std::map<std::string, double>& v, const std::string& key, int fallback) {
  return static_cast<int>(std::lround(get(v, key, fallback)));
}

}  // namespace

SearchSpace default_search_space(Algorithm a) {
  switch (a) {
    case Algorithm::ols: return {};
    case Algorithm::lasso: return {{"alpha", {1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2}}};
    case Algorithm::elastic_net:
      return {{"alpha", {1e-5, 1e-4, 1e-3, 1e-2}}, {"l1_ratio", {0.1, 0.5, 0.9, 1.0}}};
    case Algorithm::random_forest:
      return {{"n_estimators", {50, 100, 200}},
              {"max_depth", {2, 3, 4, 6}},
              {"min_samples_leaf", {5, 10, 20}},
              {"max_samples", {0.5, 0.8, 1.0}},
              {"max_features", {0.2, 0.5, 1.0}}};
    case Algorithm::gradient_boosting:
      return {{"n_estimators", {50, 100, 200}},
              {"max_depth", {2, 3, 4}},
              {"min_samples_leaf", {5, 10, 20}},
              {"learning_rate", {0.01, 0.05, 0.1}},
              {"subsample", {0.5, 0.8, 1.0}},
              {"max_features", {0.2, 0.5, 1.0}}};
    case Algorithm::neural_net:
      return {{"epochs", {20, 50, 100}},
              {"batch_size", {16, 32, 64}},
              {"n_layers", {1, 2, 3}},
              {"n_neurons", {8, 16, 32}},
              {"learning_rate", {1e-4, 1e-3, 1e-2}},
              {"l1", {1e-5, 1e-4, 1e-3}}};
  }
  return {};
}

Hyperparameters hyperparameters_from(Algorithm a, const std::map<std::string, double>& v) {
  Hyperparameters hp;
  switch (a) {
    case Algorithm::ols: hp = OlsParams{}; break;
    case Algorithm::lasso: hp = LassoParams{get(v, "alpha", LassoParams{}.alpha)}; break;
    case Algorithm::elastic_net: {
      const ElasticNetParams d;
      hp = ElasticNetParams{get(v, "alpha", d.alpha), get(v, "l1_ratio", d.l1_ratio)};
      break;
    }
    case Algorithm::random_forest: {
      const ForestParams d;
      hp = ForestParams{get_int(v, "n_estimators", d.n_estimators), get_int(v, "max_depth", d.max_depth),
                        get_int(v, "min_samples_leaf", d.min_samples_leaf),
                        get(v, "max_samples", d.max_samples), get(v, "max_features", d.max_features)};
      break;
    }
    case Algorithm::gradient_boosting: {
      const BoostingParams d;
      hp = BoostingParams{get_int(v, "n_estimators", d.n_estimators), get_int(v, "max_depth", d.max_depth),
                          get_int(v, "min_samples_leaf", d.min_samples_leaf),
                          get(v, "learning_rate", d.learning_rate), get(v, "subsample", d.subsample),
                          get(v, "max_features", d.max_features)};
      break;
    }
    case Algorithm::neural_net: {
      const NetParams d;
      hp = NetParams{get_int(v, "epochs", d.epochs),       get_int(v, "batch_size", d.batch_size),
                     get_int(v, "n_layers", d.n_layers),   get_int(v, "n_neurons", d.n_neurons),
                     get(v, "learning_rate", d.learning_rate), get(v, "l1", d.l1)};
      break;
    }
  }
  validate(hp);
  return hp;
}

std::map<std::string, double> hyperparameter_values(const Hyperparameters& hp) {
  return std::visit(
      [](const auto& p) -> std::map<std::string, double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OlsParams>) {
          return {};
        } else if constexpr (std::is_same_v<T, LassoParams>) {
          return {{"alpha", p.alpha}};
        } else if constexpr (std::is_same_v<T, ElasticNetParams>) {
          return {{"alpha", p.alpha}, {"l1_ratio", p.l1_ratio}};
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          return {{"n_estimators", p.n_estimators}, {"max_depth", p.max_depth},
                  {"min_samples_leaf", p.min_samples_leaf}, {"max_samples", p.max_samples},
                  {"max_features", p.max_features}};
        } else if constexpr (std::is_same_v<T, BoostingParams>) {
          return {{"n_estimators", p.n_estimators}, {"max_depth", p.max_depth},
                  {"min_samples_leaf", p.min_samples_leaf}, {"learning_rate", p.learning_rate},
                  {"subsample", p.subsample}, {"max_features", p.max_features}};
        } else {
          return {{"epochs", p.epochs}, {"batch_size", p.batch_size}, {"n_layers", p.n_layers},
                  {"n_neurons", p.n_neurons}, {"learning_rate", p.learning_rate}, {"l1", p.l1}};
        }
      },
      hp);
}

std::map<std::string, double> median_configuration(
    const std::vector<std::map<std::string, double>>& winners, const SearchSpace& space) {
  if (winners.empty()) throw ValidationError("empty tuning sample");
  std::map<std::string, double> out;
  for (const auto& [name, candidates] : space) {
    std::vector<double> vals;
    for (const auto& w : winners) vals.push_back(w.at(name));
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    double med = n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
    if (integer_dimension(name)) {
      // nearest candidate; ties resolve to the smaller value
      double best = candidates.front();
      for (double c : candidates) {
        if (std::abs(c - med) < std::abs(best - med) ||
            (std::abs(c - med) == std::abs(best - med) && c < best)) {
          best = c;
        }
      }
      med = best;
    }
    out[name] = med;
  }
  return out;
}

TuningResult tune_hyperparameters(const MarketData& data, const TuningOptions& options) {
  if (options.n_tasks == 0) throw ValidationError("empty tuning sample");
  if (options.trials_per_task == 0) throw ValidationError("trials_per_task must be >= 1");
  for (const auto& [name, cands] : options.space) {
    if (cands.empty()) throw ValidationError("search dimension '" + name + "' has no candidates");
  }

  RadarConfig cfg;
  cfg.algorithms = {options.algorithm};
  cfg.lags = options.lags;
  cfg.window_quarters = options.window_quarters;
  cfg.min_train_rows = options.min_train_rows;
  cfg.first_forecast_quarter = options.first_quarter;
  cfg.last_forecast_quarter = options.last_quarter;
  cfg.compute_importance = false;
  cfg.validate();

  const SignalTable signals(data.sources, data.calendar.dates(), options.lags);
  const WindowOptions window{options.window_quarters, options.min_train_rows};

  // eligible tasks: full training window and a nonempty next quarter
  std::vector<StockQuarterTask> eligible;
  for (const auto& t : enumerate_tasks(data, cfg)) {
    const Quarter target = t.quarter + 1;
    if (data.assets.series(t.asset).empty()) continue;
    const auto train = assemble_training_window(signals, data.assets, t.asset, t.quarter, window);
    if (!train) continue;
    const std::string ids[] = {t.asset};
    if (build_signal_block(signals, data.assets, ids, target.first_day(), target.last_day()).row_count() == 0) continue;
    eligible.push_back(t);
  }
  if (eligible.empty()) throw ValidationError("empty tuning sample");

  Rng rng(options.seed);
  if (eligible.size() > options.n_tasks) {
    for (std::size_t i = 0; i < options.n_tasks; ++i) {
      std::swap(eligible[i], eligible[i + rng.index(eligible.size() - i)]);
    }
    eligible.resize(options.n_tasks);
  }

  // Trials: the full grid when it fits in the budget, otherwise random draws.
  std::size_t grid_size = 1;
  for (const auto& [name, cands] : options.space) {
    if (grid_size <= options.trials_per_task) grid_size *= cands.size();
  }
  const bool full_grid = grid_size <= options.trials_per_task;

  TuningResult result;
  for (const auto& task : eligible) {
    const std::uint64_t seed = task_seed(options.seed, task);
    Rng task_rng(seed);
    const auto train = assemble_training_window(signals, data.assets, task.asset, task.quarter, window);
    const Quarter target = task.quarter + 1;
    const std::string ids[] = {task.asset};
    const SignalBlock next =
        build_signal_block(signals, data.assets, ids, target.first_day(), target.last_day());

    const std::size_t trials = full_grid ? grid_size : options.trials_per_task;
    double best_mse = std::numeric_limits<double>::infinity();
    std::map<std::string, double> best;
    for (std::size_t k = 0; k < trials; ++k) {
      std::map<std::string, double> point;
      std::size_t code = k;
      for (const auto& [name, cands] : options.space) {
        if (full_grid) {
          point[name] = cands[code % cands.size()];
          code /= cands.size();
        } else {
          point[name] = cands[task_rng.index(cands.size())];
        }
      }
      const Hyperparameters hp = hyperparameters_from(options.algorithm, point);
      double mse;
      try {
        const TrainedModel m = fit_model(hp, train.block->values, train.block->target, seed);
        mse = (m.predict(next.values) - next.target).squaredNorm() / static_cast<double>(next.row_count());
      } catch (const ConvergenceError&) {
        continue;
      } catch (const NonFiniteLossError&) {
        continue;
      }
      if (mse < best_mse) {
        best_mse = mse;
        best = point;
      }
    }
    if (best.empty() && !options.space.empty()) continue;
    result.tasks.push_back(task);
    result.best_per_task.push_back(best);
    result.best_mse.push_back(best_mse);
  }
  if (result.best_per_task.empty()) throw ValidationError("empty tuning sample");
  result.chosen = hyperparameters_from(options.algorithm,
                                       median_configuration(result.best_per_task, options.space));
  return result;
}

}  // namespace sigradar
