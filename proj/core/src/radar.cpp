#include "sigradar/radar.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <sstream>
#include <thread>
#include <tuple>

#include "sigradar/error.hpp"
#include "sigradar/rng.hpp"

namespace sigradar {

MarketData make_market_data(ReturnPanel assets, ReturnPanel sources,
                            std::optional<TradingCalendar> calendar) {
  if (assets.empty()) throw ValidationError("asset panel is empty");
  if (sources.empty()) throw ValidationError("no signals");
  MarketData data{std::move(assets), std::move(sources), {}};
  data.calendar = calendar ? std::move(*calendar) : TradingCalendar(data.assets.dates());
  return data;
}

Hyperparameters RadarConfig::hyperparameters_for(Algorithm a) const {
  auto it = hyperparameters.find(a);
  return it != hyperparameters.end() ? it->second : default_hyperparameters(a);
}

void RadarConfig::validate() const {
  if (algorithms.empty()) throw ValidationError("no algorithms selected");
  if (lags < 1) throw ValidationError("radar.lags must be >= 1");
  if (window_quarters < 1) throw ValidationError("radar.window_quarters must be >= 1");
  if (min_train_rows < 2) throw ValidationError("radar.min_train_rows must be >= 2");
  if (threads < 1) throw ValidationError("threads must be >= 1");
  for (const auto& [algo, hp] : hyperparameters) {
    if (algorithm_of(hp) != algo) throw ValidationError("hyperparameters filed under the wrong algorithm");
    sigradar::validate(hp);
  }
}

std::uint64_t task_seed(std::uint64_t base, const StockQuarterTask& task) {
  return SeedHasher(base)
      .add(task.asset)
      .add(task.quarter.index())
      .add(to_string(task.algorithm))
      .value();
}

TaskOutcome train_predict_stock_quarter(const MarketData& data, const SignalTable& signals,
                                        const StockQuarterTask& task, const RadarConfig& config) {
  TaskOutcome out;
  out.task = task;
  out.seed = task_seed(config.seed, task);

  const WindowOptions window{config.window_quarters, config.min_train_rows};
  TrainingWindow train = assemble_training_window(signals, data.assets, task.asset, task.quarter, window);
  if (!train) {
    out.skip_reason = train.skip_reason;
    return out;
  }
  const SignalBlock& block = *train.block;
  const Quarter target = task.quarter + 1;
  out.train_rows = block.row_count();
  out.train_last_date = block.rows.back().date;
  if (!(*out.train_last_date < target.first_day())) {
    throw Error("temporal hygiene violated for " + task.asset + " " + task.quarter.str());
  }

  TrainedModel model;
  try {
    model = fit_model(config.hyperparameters_for(task.algorithm), block.values, block.target, out.seed);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    out.skip_reason = std::string("fit failed: ") + e.what();
    out.failed = true;
    return out;
  }

  const std::string ids[] = {task.asset};
  const SignalBlock next =
      build_signal_block(signals, data.assets, ids, target.first_day(), target.last_day());
  if (next.row_count() > 0) {
    const Eigen::VectorXd yhat = model.predict(next.values);
    out.forecasts.reserve(next.row_count());
    for (std::size_t r = 0; r < next.row_count(); ++r) {
      out.forecasts.push_back({next.rows[r].date, task.asset, task.algorithm, yhat(static_cast<Eigen::Index>(r))});
    }
  }

  if (config.compute_importance) {
    ImportanceOptions opts = config.importance;
    opts.seed = Rng::mix(out.seed);
    const Eigen::VectorXd imp = signal_importance(model, block.values, opts);
    out.importance.reserve(block.columns.size());
    for (std::size_t c = 0; c < block.columns.size(); ++c) {
      out.importance.push_back({task.asset, task.quarter, task.algorithm, block.columns[c],
                                imp(static_cast<Eigen::Index>(c))});
    }
  }
  if (config.keep_models) out.model = std::move(model);
  return out;
}

std::vector<StockQuarterTask> enumerate_tasks(const MarketData& data, const RadarConfig& config) {
  std::vector<StockQuarterTask> tasks;
  const auto quarters = data.calendar.quarters();
  if (quarters.empty()) return tasks;
  const Quarter first_train_end = quarters.front() + (config.window_quarters - 1);
  const Quarter last_train_end = quarters.back() - 1;
  for (const auto& asset : data.assets.entities()) {
    for (Quarter t = first_train_end; t <= last_train_end; t = t + 1) {
      const Quarter target = t + 1;
      if (config.first_forecast_quarter && target < *config.first_forecast_quarter) continue;
      if (config.last_forecast_quarter && target > *config.last_forecast_quarter) continue;
      for (Algorithm a : config.algorithms) tasks.push_back({asset, t, a});
    }
  }
  return tasks;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
  }
  // surface the lowest-index failure so the error does not depend on scheduling
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

RadarResult run_radar(const MarketData& data, const RadarConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const SignalTable signals(data.sources, data.calendar.dates(), config.lags);
  const auto tasks = enumerate_tasks(data, config);

  RadarResult result;
  result.outcomes.resize(tasks.size());
  parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
    result.outcomes[i] = train_predict_stock_quarter(data, signals, tasks[i], config);
  });

  RunReport& rep = result.report;
  rep.tasks_total = tasks.size();
  rep.threads = config.threads;
  rep.empty_signal_windows = signals.empty_windows();
  for (const auto& o : result.outcomes) {
    if (o.skipped()) {
      rep.skipped.push_back({o.task, o.skip_reason, o.failed});
      continue;
    }
    ++rep.tasks_executed;
    result.forecasts.insert(result.forecasts.end(), o.forecasts.begin(), o.forecasts.end());
    result.importance.insert(result.importance.end(), o.importance.begin(), o.importance.end());
  }
  if (rep.tasks_executed == 0) {
    throw ValidationError("no runnable stock-quarter tasks (" + std::to_string(tasks.size()) +
                          " enumerated, all skipped)");
  }
  std::sort(result.forecasts.begin(), result.forecasts.end(), [](const Forecast& a, const Forecast& b) {
    return std::tie(a.date, a.asset, a.algorithm) < std::tie(b.date, b.asset, b.algorithm);
  });
  std::sort(result.importance.begin(), result.importance.end(),
            [](const ImportanceRecord& a, const ImportanceRecord& b) {
              return std::tie(a.asset, a.quarter, a.algorithm, a.signal) <
                     std::tie(b.asset, b.quarter, b.algorithm, b.signal);
            });
  rep.forecasts = result.forecasts.size();
  rep.importance_records = result.importance.size();
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "[run]\n";
  os << "tasks_total = " << tasks_total << "\n";
  os << "tasks_executed = " << tasks_executed << "\n";
  os << "tasks_skipped = " << skipped.size() << "\n";
  os << "tasks_failed = "
     << std::count_if(skipped.begin(), skipped.end(), [](const SkipRecord& s) { return s.failed; })
     << "\n";
  os << "forecasts = " << forecasts << "\n";
  os << "importance_records = " << importance_records << "\n";
  os << "empty_signal_windows = " << empty_signal_windows << "\n";
  os << "threads = " << threads << "\n";
  os << "wall_seconds = " << wall_seconds << "\n";
  os << "\n[skipped]\n";
  for (const auto& s : skipped) {
    os << s.task.asset << "," << s.task.quarter.str() << "," << to_string(s.task.algorithm) << ","
       << s.reason << "\n";
  }
  return os.str();
}

}  // namespace sigradar
