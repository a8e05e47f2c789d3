#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sigradar/calendar.hpp"
#include "sigradar/econometrics.hpp"
#include "sigradar/panel.hpp"
#include "sigradar/portfolio.hpp"
#include "sigradar/radar.hpp"
#include "sigradar/synth.hpp"

namespace sigradar::io {

namespace fs = std::filesystem;

// Shortest round-trip decimal text.
std::string format_double(double v);

// Rows of a comma-separated file with the given header. Missing file throws
// MissingInputError; a wrong header or ragged row throws ValidationError.
std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::vector<std::string>& header);
double parse_double(const std::string& text, const fs::path& path, std::size_t line);

ReturnPanel read_return_panel(const fs::path& path);  // date,entity,ret
void write_return_panel(const fs::path& path, const ReturnPanel& panel);

TradingCalendar read_calendar(const fs::path& path);  // one date per line, optional "date" header
void write_calendar(const fs::path& path, const TradingCalendar& calendar);

using CapRows = std::map<Date, std::map<std::string, double>>;
CapRows read_caps(const fs::path& path);  // date,asset,cap
void write_caps(const fs::path& path, const CapRows& caps);
CapTable to_cap_table(const CapRows& rows);

std::vector<Forecast> read_forecasts(const fs::path& path);  // date,asset,algo,yhat
void write_forecasts(const fs::path& path, const std::vector<Forecast>& forecasts);

std::vector<ImportanceRecord> read_importance(const fs::path& path);  // asset,quarter,algo,source,lag_week,importance
void write_importance(const fs::path& path, const std::vector<ImportanceRecord>& records);

struct NamedSeries {
  std::string name;
  PortfolioSeries series;
};
void write_portfolios(const fs::path& path, const std::vector<NamedSeries>& series);  // date,name,ret,turnover

FactorSeries read_factors(const fs::path& path);  // date,<factor>...
void write_factors(const fs::path& path, const FactorSeries& factors);

std::map<Date, double> read_rf(const fs::path& path);  // date,rf
void write_rf(const fs::path& path, const std::map<Date, double>& rf);

void write_truth(const fs::path& path, const GroundTruth& truth);  // asset,source,lag_week,loading

/// returns.csv markets.csv calendar.csv caps.csv factors.csv rf.csv truth.csv
void write_scenario(const fs::path& dir, const Scenario& scenario);

void write_text(const fs::path& path, const std::string& text);

}  // namespace sigradar::io
