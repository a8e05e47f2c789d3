#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigradar/config.hpp"
#include "sigradar/io.hpp"
#include "sigradar/radar.hpp"

namespace sigradar::cli {

namespace fs = std::filesystem;

struct Options {
  std::optional<fs::path> config;
  fs::path out = ".";
  std::optional<std::string> algos;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};

/// --threads wins, then RADAR_THREADS, then the config value.
unsigned resolve_threads(std::optional<unsigned> flag, const char* env, unsigned configured);

/// Writes returns.csv, markets.csv, calendar.csv, caps.csv, factors.csv, rf.csv, truth.csv.
void cmd_synth(const Options& opt);
/// Writes forecasts.csv, importance.csv and run_report.txt; returns the result.
RadarResult cmd_radar(const Options& opt);
/// Writes tuned.cfg with hp.* lines.
std::string cmd_tune(const Options& opt);
/// Reads forecasts.csv (and importance.csv when present) from --out, writes
/// report.txt and portfolio.csv, returns the report text.
std::string cmd_report(const Options& opt);

struct ReportData {
  ReturnPanel realized;
  TradingCalendar calendar;
  std::vector<Forecast> forecasts;
  std::vector<ImportanceRecord> importance;
  std::optional<io::CapRows> caps;
  std::optional<FactorSeries> factors;
  std::map<Date, double> rf;
  PortfolioParams portfolio;
  bool positive_r2_filter = true;
};

struct ReportOutput {
  std::string text;
  std::vector<io::NamedSeries> portfolios;
};

ReportOutput build_report(const ReportData& data);

/// Parses argv, dispatches, and maps errors to exit codes (0 ok, 1 validation, 2 missing input).
int run(int argc, char** argv);

}  // namespace sigradar::cli
