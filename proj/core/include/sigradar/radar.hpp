#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigradar/calendar.hpp"
#include "sigradar/hyperparameters.hpp"
#include "sigradar/model.hpp"
#include "sigradar/panel.hpp"
#include "sigradar/shapley.hpp"

namespace sigradar {

struct MarketData {
  ReturnPanel assets;
  ReturnPanel sources;
  TradingCalendar calendar;  // defaults to the asset panel's date set
};

MarketData make_market_data(ReturnPanel assets, ReturnPanel sources,
                            std::optional<TradingCalendar> calendar = std::nullopt);

struct RadarConfig {
  std::vector<Algorithm> algorithms{Algorithm::lasso, Algorithm::random_forest,
                                    Algorithm::gradient_boosting, Algorithm::neural_net};
  int lags = 4;
  int window_quarters = 4;
  std::map<Algorithm, Hyperparameters> hyperparameters;  // missing entries use defaults
  std::uint64_t seed = 0;
  std::size_t min_train_rows = 60;
  bool compute_importance = true;
  ImportanceOptions importance;  // seed is replaced by the per-task seed
  // Restrict forecast quarters (T+1) to this inclusive range when set.
  std::optional<Quarter> first_forecast_quarter;
  std::optional<Quarter> last_forecast_quarter;
  unsigned threads = 1;
  bool keep_models = false;

  Hyperparameters hyperparameters_for(Algorithm a) const;
  void validate() const;
};

struct Forecast {
  Date date;
  std::string asset;
  Algorithm algorithm = Algorithm::lasso;
  double yhat = 0.0;
};

struct StockQuarterTask {
  std::string asset;
  Quarter quarter;  // last training quarter T; forecasts cover T+1
  Algorithm algorithm = Algorithm::lasso;
};

struct TaskOutcome {
  StockQuarterTask task;
  std::uint64_t seed = 0;
  std::vector<Forecast> forecasts;
  std::vector<ImportanceRecord> importance;
  std::optional<TrainedModel> model;
  std::size_t train_rows = 0;
  std::optional<Date> train_last_date;  // latest row date the model saw
  std::string skip_reason;              // nonempty when the task did not run
  bool failed = false;                  // fit raised an error (reason recorded)

  bool skipped() const { return !skip_reason.empty(); }
};

std::uint64_t task_seed(std::uint64_t base, const StockQuarterTask& task);

/// Fits on quarters T-(w-1)..T only and forecasts every trading day of the
/// asset in T+1. A window below the row minimum yields a skipped outcome.
TaskOutcome train_predict_stock_quarter(const MarketData& data, const SignalTable& signals,
                                        const StockQuarterTask& task, const RadarConfig& config);

struct SkipRecord {
  StockQuarterTask task;
  std::string reason;
  bool failed = false;
};

struct RunReport {
  std::size_t tasks_total = 0;
  std::size_t tasks_executed = 0;
  std::vector<SkipRecord> skipped;
  std::size_t forecasts = 0;
  std::size_t importance_records = 0;
  std::size_t empty_signal_windows = 0;
  unsigned threads = 1;
  double wall_seconds = 0.0;

  std::string to_text() const;
};

struct RadarResult {
  std::vector<Forecast> forecasts;             // sorted by (date, asset, algorithm)
  std::vector<ImportanceRecord> importance;    // sorted by (asset, quarter, algorithm, signal)
  std::vector<TaskOutcome> outcomes;           // task order; models only when keep_models
  RunReport report;
};

std::vector<StockQuarterTask> enumerate_tasks(const MarketData& data, const RadarConfig& config);

/// Runs every stock-quarter task. Output does not depend on the thread count
/// or on completion order. Throws ValidationError when no task can run.
RadarResult run_radar(const MarketData& data, const RadarConfig& config);

// ---- hyperparameter tuning ----

/// Candidate values per hyperparameter name (e.g. "alpha", "max_depth").
using SearchSpace = std::map<std::string, std::vector<double>>;

SearchSpace default_search_space(Algorithm a);
Hyperparameters hyperparameters_from(Algorithm a, const std::map<std::string, double>& values);
std::map<std::string, double> hyperparameter_values(const Hyperparameters& hp);

struct TuningOptions {
  Algorithm algorithm = Algorithm::lasso;
  SearchSpace space;
  std::size_t n_tasks = 2000;
  std::size_t trials_per_task = 20;
  // Forecast quarters (T+1) eligible for tuning, inclusive. Must precede the evaluation period.
  std::optional<Quarter> first_quarter;
  std::optional<Quarter> last_quarter;
  std::uint64_t seed = 0;
  int lags = 4;
  int window_quarters = 4;
  std::size_t min_train_rows = 60;
};

struct TuningResult {
  Hyperparameters chosen;
  std::vector<StockQuarterTask> tasks;
  std::vector<std::map<std::string, double>> best_per_task;
  std::vector<double> best_mse;
};

/// Independent random search per sampled stock-quarter, scored by next-quarter
/// squared forecast error, then the per-dimension median across tasks.
TuningResult tune_hyperparameters(const MarketData& data, const TuningOptions& options);

/// Per-dimension median of the per-task winners. Integer-valued dimensions are
/// snapped to the nearest candidate value.
std::map<std::string, double> median_configuration(
    const std::vector<std::map<std::string, double>>& winners, const SearchSpace& space);

}  // namespace sigradar
