#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "sigradar/econometrics.hpp"
#include "sigradar/error.hpp"
#include "sigradar/strategy.hpp"
#include "sigradar/synth.hpp"

namespace sigradar::cli {

unsigned resolve_threads(std::optional<unsigned> flag, const char* env, unsigned configured) {
  if (flag) {
    if (*flag < 1) throw ValidationError("--threads must be >= 1");
    return *flag;
  }
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ValidationError("RADAR_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  return configured;
}

namespace {

struct Loaded {
  ConfigFile file;
  RunConfig run;
  ScenarioSpec scenario;
};

// Data files default to the config directory, or to --out without a config.
Loaded load(const Options& opt) {
  Loaded l;
  if (opt.config) l.file = ConfigFile::load(*opt.config);
  if (opt.seed) {
    l.file.set("seed", std::to_string(*opt.seed));
  }
  if (opt.algos) l.file.set("radar.algorithms", *opt.algos);
  l.run = run_config_from(l.file);
  l.scenario = scenario_from(l.file);
  l.file.reject_unknown();

  const fs::path base = opt.config ? opt.config->parent_path() : opt.out;
  auto resolve = [&](const std::string& key, fs::path& p) {
    if (!l.file.has(key)) p = base / p.filename();
  };
  resolve("data.returns", l.run.data.returns);
  resolve("data.markets", l.run.data.markets);
  auto optional_file = [&](const std::string& key, std::optional<fs::path>& p, const char* name) {
    if (!l.file.has(key) && fs::exists(base / name)) p = base / name;
  };
  optional_file("data.calendar", l.run.data.calendar, "calendar.csv");
  optional_file("data.caps", l.run.data.caps, "caps.csv");
  optional_file("data.factors", l.run.data.factors, "factors.csv");
  optional_file("data.rf", l.run.data.rf, "rf.csv");

  l.run.radar.threads = resolve_threads(opt.threads, std::getenv("RADAR_THREADS"), l.run.radar.threads);
  return l;
}

MarketData load_market(const RunConfig& rc) {
  std::optional<TradingCalendar> cal;
  if (rc.data.calendar) cal = io::read_calendar(*rc.data.calendar);
  return make_market_data(io::read_return_panel(rc.data.returns), io::read_return_panel(rc.data.markets),
                          std::move(cal));
}

std::string label(Algorithm a) {
  switch (a) {
    case Algorithm::ols: return "OLS";
    case Algorithm::lasso: return "LASSO";
    case Algorithm::elastic_net: return "ENet";
    case Algorithm::random_forest: return "RF";
    case Algorithm::gradient_boosting: return "GB";
    case Algorithm::neural_net: return "NN";
  }
  return "?";
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::string name, std::vector<std::string> cells) { rows_.push_back({std::move(name), std::move(cells)}); }
  std::string str() const {
    std::ostringstream os;
    os << std::left << std::setw(22) << "";
    for (const auto& h : header_) os << std::right << std::setw(14) << h;
    os << "\n";
    for (const auto& [name, cells] : rows_) {
      os << std::left << std::setw(22) << name;
      for (const auto& c : cells) os << std::right << std::setw(14) << c;
      os << "\n";
    }
    return os.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::pair<std::string, std::vector<std::string>>> rows_;
};

std::optional<PerformanceStats> try_stats(const PortfolioSeries& s, const std::map<Date, double>& rf = {}) {
  try {
    return performance_stats(s, rf);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

std::string bp_with_stars(const std::optional<PerformanceStats>& st) {
  if (!st) return "n/a";
  return fixed(st->mean_excess * 1e4, 2) + stars(st->t_stat);
}

std::string t_cell(const std::optional<PerformanceStats>& st) {
  return st ? "(" + fixed(st->t_stat, 2) + ")" : "";
}

}  // namespace

void cmd_synth(const Options& opt) {
  const Loaded l = load(opt);
  const Scenario sc = generate(l.scenario);
  io::write_scenario(opt.out, sc);
  std::cout << "wrote scenario to " << opt.out.string() << " (" << sc.assets.entity_count() << " assets, "
            << sc.markets.entity_count() << " markets, " << sc.calendar.size() << " trading days)\n";
}

RadarResult cmd_radar(const Options& opt) {
  const Loaded l = load(opt);
  const MarketData data = load_market(l.run);
  RadarResult result = run_radar(data, l.run.radar);
  io::write_forecasts(opt.out / "forecasts.csv", result.forecasts);
  io::write_importance(opt.out / "importance.csv", result.importance);
  io::write_text(opt.out / "run_report.txt", result.report.to_text());
  std::cout << "tasks executed " << result.report.tasks_executed << "/" << result.report.tasks_total << ", "
            << result.forecasts.size() << " forecasts\n";
  return result;
}

std::string cmd_tune(const Options& opt) {
  const Loaded l = load(opt);
  const RunConfig& rc = l.run;
  const auto eval_first = rc.radar.first_forecast_quarter;
  auto tune_last = rc.tune.last_quarter;
  if (!tune_last) {
    if (!eval_first) {
      throw ValidationError("tuning needs tune.last_quarter or radar.first_forecast_quarter so it precedes evaluation");
    }
    tune_last = *eval_first - 1;
  }
  if (eval_first && !(*tune_last < *eval_first)) {
    throw ValidationError("tuning period (through " + tune_last->str() + ") must precede the evaluation period (from " +
                          eval_first->str() + ")");
  }
  const MarketData data = load_market(rc);
  std::map<Algorithm, Hyperparameters> chosen;
  for (Algorithm a : rc.radar.algorithms) {
    TuningOptions t;
    t.algorithm = a;
    auto sp = rc.tune.spaces.find(a);
    t.space = sp != rc.tune.spaces.end() ? sp->second : default_search_space(a);
    if (t.space.empty()) {
      chosen[a] = default_hyperparameters(a);
      continue;
    }
    t.n_tasks = rc.tune.n_tasks;
    t.trials_per_task = rc.tune.trials_per_task;
    t.first_quarter = rc.tune.first_quarter;
    t.last_quarter = tune_last;
    t.seed = rc.seed;
    t.lags = rc.radar.lags;
    t.window_quarters = rc.radar.window_quarters;
    t.min_train_rows = rc.radar.min_train_rows;
    const TuningResult res = tune_hyperparameters(data, t);
    chosen[a] = res.chosen;
    std::cout << label(a) << ": tuned on " << res.tasks.size() << " stock-quarters\n";
  }
  const std::string text = hyperparameter_text(chosen);
  io::write_text(opt.out / "tuned.cfg", text);
  return text;
}

ReportOutput build_report(const ReportData& d) {
  if (d.forecasts.empty()) throw ValidationError("empty forecast file");
  std::ostringstream os;
  ReportOutput out;

  std::set<Algorithm> algo_set;
  for (const auto& f : d.forecasts) algo_set.insert(f.algorithm);
  const std::vector<Algorithm> algos(algo_set.begin(), algo_set.end());
  std::vector<std::string> header;
  for (Algorithm a : algos) header.push_back(label(a));

  std::optional<CapTable> cap_table;
  if (d.caps) cap_table = io::to_cap_table(*d.caps);
  PortfolioInputs in{&d.realized, d.portfolio.weighting, cap_table ? &*cap_table : nullptr, &d.calendar};

  // long-short portfolios
  const auto ls = long_short_portfolios(d.forecasts, d.portfolio.fraction, in);
  std::optional<LongShort> combined;
  if (ls.size() == algos.size() && !ls.empty()) combined = combined_portfolio(ls, in);

  std::vector<std::string> ls_header = header;
  ls_header.push_back("Combined");
  std::vector<const PortfolioSeries*> columns;
  for (Algorithm a : algos) {
    auto it = ls.find(a);
    columns.push_back(it == ls.end() ? nullptr : &it->second.series);
  }
  columns.push_back(combined ? &combined->series : nullptr);

  {
    os << "Long-short portfolios, top minus bottom " << fixed(d.portfolio.fraction * 100, 1)
       << "% of forecasts, daily returns in basis points\n";
    Table t(ls_header);
    std::vector<std::string> mean, tstat, alpha, alpha_t, turn, net, annual;
    for (const auto* s : columns) {
      if (s == nullptr) {
        for (auto* v : {&mean, &tstat, &alpha, &alpha_t, &turn, &net, &annual}) v->push_back("n/a");
        continue;
      }
      const auto st = try_stats(*s);
      mean.push_back(bp_with_stars(st));
      tstat.push_back(t_cell(st));
      if (d.factors) {
        try {
          const RegressionResult r = factor_alpha(*s, {}, *d.factors);
          alpha.push_back(fixed(r.coef_of("alpha") * 1e4, 2) + stars(r.t_of("alpha")));
          alpha_t.push_back("(" + fixed(r.t_of("alpha"), 2) + ")");
        } catch (const ValidationError&) {
          alpha.push_back("n/a");
          alpha_t.push_back("");
        }
      }
      turn.push_back(fixed(s->mean_turnover(), 3));
      const PortfolioSeries n = apply_costs(*s, d.portfolio.cost_bps);
      net.push_back(fixed(n.mean() * 1e4, 2));
      annual.push_back(fixed(n.mean() * 252 * 100, 2));
    }
    t.row("Mean", mean);
    t.row("", tstat);
    if (d.factors) {
      t.row("Six-factor alpha", alpha);
      t.row("", alpha_t);
    }
    t.row("Turnover", turn);
    t.row("Net of costs (" + fixed(d.portfolio.cost_bps, 2) + "bp)", net);
    t.row("Net annual (%)", annual);
    os << t.str() << "\n";
  }

  {
    os << "Risk of long-short portfolios\n";
    Table t(ls_header);
    std::vector<std::string> sharpe, loss, days;
    for (const auto* s : columns) {
      const auto st = s ? try_stats(*s) : std::nullopt;
      sharpe.push_back(st ? fixed(st->sharpe, 2) : "n/a");
      loss.push_back(st ? fixed(st->max_quarter_loss * 100, 2) : "n/a");
      days.push_back(s ? std::to_string(s->size()) : "0");
    }
    t.row("Sharpe ratio", sharpe);
    t.row("Max 1Q loss (%)", loss);
    t.row("Days", days);
    os << t.str() << "\n";
  }

  if (d.portfolio.deciles) {
    const auto dec = decile_portfolios(d.forecasts, in);
    if (!dec.empty()) {
      os << "Decile portfolios sorted on forecasts, daily returns in basis points\n";
      Table t(header);
      for (int k = 9; k >= 0; --k) {
        std::vector<std::string> cells, tcells;
        for (Algorithm a : algos) {
          auto it = dec.find(a);
          const auto st = it == dec.end() ? std::nullopt : try_stats(it->second[static_cast<std::size_t>(k)]);
          cells.push_back(bp_with_stars(st));
          tcells.push_back(t_cell(st));
        }
        const std::string name = k == 9 ? "High (10)" : k == 0 ? "Low (1)" : "(" + std::to_string(k + 1) + ")";
        t.row(name, cells);
        t.row("", tcells);
      }
      std::vector<std::string> hl, hlt;
      for (Algorithm a : algos) {
        auto it = dec.find(a);
        std::optional<PerformanceStats> st;
        if (it != dec.end()) st = try_stats(long_short(it->second[9], it->second[0]));
        hl.push_back(bp_with_stars(st));
        hlt.push_back(t_cell(st));
      }
      t.row("High - Low", hl);
      t.row("", hlt);
      os << t.str() << "\n";
    }
  }

  // out-of-sample R2
  const std::vector<R2Record> r2 = stock_quarter_r2(d.forecasts, d.realized);
  if (!r2.empty()) {
    const R2Summary s = summarize_r2(r2);
    os << "Out-of-sample R2 by stock-quarter (%)\n";
    Table t(header);
    auto per_algo = [&](auto fn) {
      std::vector<std::string> cells;
      for (Algorithm a : algos) {
        auto it = s.by_algorithm.find(a);
        cells.push_back(it == s.by_algorithm.end() ? "n/a" : fn(it->second));
      }
      return cells;
    };
    t.row("Fraction with R2>0", per_algo([](const R2AlgoSummary& x) { return fixed(x.fraction_positive * 100, 2); }));
    for (std::size_t i = 0; i < kR2Percentiles.size(); ++i) {
      t.row("Pct " + fixed(kR2Percentiles[i], 0),
            per_algo([i](const R2AlgoSummary& x) { return fixed(x.percentiles[i] * 100, 2); }));
    }
    t.row("Mean (R2>0)", per_algo([](const R2AlgoSummary& x) { return fixed(x.mean_positive * 100, 2); }));
    t.row("Stock-quarters", per_algo([](const R2AlgoSummary& x) { return std::to_string(x.count); }));
    os << t.str();
    os << "Fraction with R2>0 under at least one algorithm: " << fixed(s.union_fraction * 100, 2) << "\n\n";
  }

  // importance decay
  if (!d.importance.empty()) {
    for (DecayForm form : {DecayForm::linear, DecayForm::exponential}) {
      std::vector<std::string> titles;
      std::vector<RegressionResult> cols;
      std::vector<std::string> windows;
      for (Algorithm a : algos) {
        ImportanceRegressionOptions o;
        o.form = form;
        if (d.positive_r2_filter) o.positive_filter = &r2;
        try {
          RegressionResult r = importance_decay_regression(d.importance, a, o);
          std::string w = "n/a";
          try {
            w = std::to_string(dissemination_window(r.coef(0), r.coef(1), form));
          } catch (const ValidationError&) {
            w = "no decay";
          }
          titles.push_back(label(a));
          cols.push_back(std::move(r));
          windows.push_back(w);
        } catch (const ValidationError&) {
          continue;
        }
      }
      if (cols.empty()) continue;
      os << (form == DecayForm::linear ? "Signal importance (x1e4) on lagged week\n"
                                       : "Signal importance (x1e4) on exp(lagged week)\n");
      os << format_regression_table(titles, cols);
      os << std::left << std::setw(20) << "Window (weeks)";
      for (const auto& w : windows) os << std::right << std::setw(16) << w;
      os << "\n\n";
    }

    // LASSO importance is |beta|, so nonzero importance marks a selected signal
    std::map<std::pair<std::string, Quarter>, std::vector<double>> lasso;
    for (const auto& r : d.importance) {
      if (r.algorithm == Algorithm::lasso) lasso[{r.asset, r.quarter}].push_back(r.importance);
    }
    if (!lasso.empty()) {
      std::vector<Eigen::VectorXd> coefs;
      for (const auto& [k, v] : lasso) coefs.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
      os << "LASSO sparsity\n";
      os << "Fraction of signals with non-zero coefficients: " << fixed(lasso_sparsity(coefs), 4) << " over "
         << coefs.size() << " models\n\n";
    }
  }

  // bottom-up market timing
  if (d.caps) {
    const auto index = index_returns(d.realized, *d.caps, d.calendar);
    const auto days = timing_days(d.forecasts, *d.caps, d.calendar, index);
    if (days.size() >= 2) {
      os << "Bottom-up market timing, daily returns in basis points\n";
      PortfolioSeries hold;
      for (const auto& day : days) {
        hold.dates.push_back(day.date);
        hold.returns.push_back(day.index_return);
      }
      const PortfolioSeries timing = market_timing(days, d.portfolio.leverage);
      Table t({"Index", "Timing " + fixed(d.portfolio.leverage * 100, 0) + "%"});
      const auto hs = try_stats(hold, d.rf);
      const auto ts = try_stats(timing, d.rf);
      t.row("Mean excess", {bp_with_stars(hs), bp_with_stars(ts)});
      t.row("", {t_cell(hs), t_cell(ts)});
      t.row("Sharpe ratio", {hs ? fixed(hs->sharpe, 2) : "n/a", ts ? fixed(ts->sharpe, 2) : "n/a"});
      t.row("Max 1Q loss (%)",
            {hs ? fixed(hs->max_quarter_loss * 100, 2) : "n/a", ts ? fixed(ts->max_quarter_loss * 100, 2) : "n/a"});
      t.row("Turnover", {"0.000", fixed(timing.mean_turnover(), 3)});
      t.row("Net of costs", {fixed(hold.mean() * 1e4, 2), fixed(apply_costs(timing, d.portfolio.cost_bps).mean() * 1e4, 2)});
      os << t.str() << "\n";
      out.portfolios.push_back({"timing", timing});
    }
  }

  if (combined) {
    const MonthlySeries m = to_monthly(combined->series);
    double mean = 0.0;
    for (double r : m.returns) mean += r;
    mean /= static_cast<double>(m.returns.size());
    os << "Combined long-short, monthly compounded: mean " << fixed(mean * 100, 3) << "% over " << m.returns.size()
       << " months\n";
  }

  for (Algorithm a : algos) {
    auto it = ls.find(a);
    if (it == ls.end()) continue;
    const std::string tag(to_string(a));
    out.portfolios.push_back({tag + "_top", it->second.top.series});
    out.portfolios.push_back({tag + "_bottom", it->second.bottom.series});
    out.portfolios.push_back({tag + "_long_short", it->second.series});
  }
  if (combined) out.portfolios.push_back({"combined_long_short", combined->series});

  out.text = os.str();
  return out;
}

std::string cmd_report(const Options& opt) {
  const Loaded l = load(opt);
  ReportData d;
  d.forecasts = io::read_forecasts(opt.out / "forecasts.csv");
  if (d.forecasts.empty()) throw ValidationError("empty forecast file");
  if (fs::exists(opt.out / "importance.csv")) d.importance = io::read_importance(opt.out / "importance.csv");
  d.realized = io::read_return_panel(l.run.data.returns);
  d.calendar = l.run.data.calendar ? io::read_calendar(*l.run.data.calendar) : TradingCalendar(d.realized.dates());
  if (l.run.data.caps) d.caps = io::read_caps(*l.run.data.caps);
  if (l.run.data.factors) d.factors = io::read_factors(*l.run.data.factors);
  if (l.run.data.rf) d.rf = io::read_rf(*l.run.data.rf);
  d.portfolio = l.run.portfolio;
  d.positive_r2_filter = l.run.positive_r2_filter;
  const ReportOutput r = build_report(d);
  io::write_text(opt.out / "report.txt", r.text);
  io::write_portfolios(opt.out / "portfolio.csv", r.portfolios);
  return r.text;
}

int run(int argc, char** argv) {
  CLI::App app{"sigradar: foreign-signal return forecasting and portfolio backtests"};
  app.require_subcommand(1);
  Options opt;
  std::string config, out = ".", algos;
  unsigned threads = 0;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Config file (key = value)");
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--algos", algos, "Comma-separated algorithms (lasso,enet,ols,rf,gb,nn)");
    sub->add_option("--threads", threads, "Worker threads (falls back to RADAR_THREADS)");
    sub->add_option("--seed", seed, "Base seed");
  };
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  auto* radar = app.add_subcommand("radar", "Walk-forward training, forecasts and signal importance");
  auto* tune = app.add_subcommand("tune", "Random-search hyperparameter tuning");
  auto* report = app.add_subcommand("report", "Portfolio, R2 and importance tables");
  for (auto* s : {synth, radar, tune, report}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (!config.empty()) opt.config = config;
  opt.out = out;
  if (sub->count("--algos")) opt.algos = algos;
  if (sub->count("--threads")) opt.threads = threads;
  if (sub->count("--seed")) opt.seed = seed;

  try {
    if (sub == synth) {
      cmd_synth(opt);
    } else if (sub == radar) {
      cmd_radar(opt);
    } else if (sub == tune) {
      std::cout << cmd_tune(opt);
    } else {
      std::cout << cmd_report(opt);
    }
  } catch (const MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace sigradar::cli
