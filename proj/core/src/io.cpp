#include "sigradar/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sigradar/error.hpp"

namespace sigradar::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

Date parse_date_at(const std::string& text, const fs::path& path, std::size_t line) {
  try {
    return parse_date(text);
  } catch (const ValidationError& e) {
    throw ValidationError(where(path, line) + ": " + e.what());
  }
}

int parse_int(const std::string& text, const fs::path& path, std::size_t line) {
  int v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ValidationError(where(path, line) + ": not an integer: '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double(const std::string& text, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [p, ec] = std::from_chars(first, text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty()) {
    throw ValidationError(where(path, line) + ": not a number: '" + text + "'");
  }
  return v;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::vector<std::string>& header) {
  std::ifstream is(path);
  if (!is) throw MissingInputError("missing input file: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t n = 0;
  bool seen_header = false;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (!seen_header) {
      seen_header = true;
      if (!header.empty() && cells != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw ValidationError(where(path, n) + ": expected header '" + want + "'");
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw ValidationError(where(path, n) + ": expected " + std::to_string(header.size()) + " fields");
    }
    rows.push_back(std::move(cells));
  }
  if (!seen_header) throw ValidationError(path.string() + ": empty file");
  return rows;
}

ReturnPanel read_return_panel(const fs::path& path) {
  ReturnPanel panel;
  std::size_t line = 1;
  for (const auto& r : read_csv(path, {"date", "entity", "ret"})) {
    ++line;
    try {
      panel.add(parse_date_at(r[0], path, line), r[1], parse_double(r[2], path, line));
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      if (msg.rfind(path.string(), 0) == 0) throw;
      throw ValidationError(where(path, line) + ": " + msg);
    }
  }
  return panel;
}

void write_return_panel(const fs::path& path, const ReturnPanel& panel) {
  auto os = open_out(path);
  os << "date,entity,ret\n";
  // date-major keeps the file readable as a time series
  std::map<Date, std::vector<std::pair<std::string, double>>> by_date;
  for (const auto& e : panel.entities()) {
    for (const auto& o : panel.series(e)) by_date[o.date].push_back({e, o.ret});
  }
  for (const auto& [d, cells] : by_date) {
    for (const auto& [e, r] : cells) os << format_date(d) << ',' << e << ',' << format_double(r) << '\n';
  }
}

TradingCalendar read_calendar(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw MissingInputError("missing input file: " + path.string());
  std::vector<Date> dates;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (n == 1 && line == "date")) continue;
    dates.push_back(parse_date_at(line, path, n));
  }
  return TradingCalendar(std::move(dates));
}

void write_calendar(const fs::path& path, const TradingCalendar& calendar) {
  auto os = open_out(path);
  os << "date\n";
  for (Date d : calendar.dates()) os << format_date(d) << '\n';
}

CapRows read_caps(const fs::path& path) {
  CapRows rows;
  std::size_t line = 1;
  for (const auto& r : read_csv(path, {"date", "asset", "cap"})) {
    ++line;
    const double cap = parse_double(r[2], path, line);
    if (!(cap > 0.0)) throw ValidationError(where(path, line) + ": cap must be > 0");
    rows[parse_date_at(r[0], path, line)][r[1]] = cap;
  }
  return rows;
}

void write_caps(const fs::path& path, const CapRows& caps) {
  auto os = open_out(path);
  os << "date,asset,cap\n";
  for (const auto& [d, row] : caps) {
    for (const auto& [a, c] : row) os << format_date(d) << ',' << a << ',' << format_double(c) << '\n';
  }
}

CapTable to_cap_table(const CapRows& rows) {
  CapTable t;
  for (const auto& [d, row] : rows) {
    for (const auto& [a, c] : row) t.add(d, a, c);
  }
  return t;
}

std::vector<Forecast> read_forecasts(const fs::path& path) {
  std::vector<Forecast> out;
  std::size_t line = 1;
  for (const auto& r : read_csv(path, {"date", "asset", "algo", "yhat"})) {
    ++line;
    Algorithm a;
    try {
      a = parse_algorithm(r[2]);
    } catch (const ValidationError& e) {
      throw ValidationError(where(path, line) + ": " + e.what());
    }
    out.push_back({parse_date_at(r[0], path, line), r[1], a, parse_double(r[3], path, line)});
  }
  return out;
}

void write_forecasts(const fs::path& path, const std::vector<Forecast>& forecasts) {
  auto os = open_out(path);
  os << "date,asset,algo,yhat\n";
  for (const auto& f : forecasts) {
    os << format_date(f.date) << ',' << f.asset << ',' << to_string(f.algorithm) << ',' << format_double(f.yhat)
       << '\n';
  }
}

std::vector<ImportanceRecord> read_importance(const fs::path& path) {
  std::vector<ImportanceRecord> out;
  std::size_t line = 1;
  for (const auto& r : read_csv(path, {"asset", "quarter", "algo", "source", "lag_week", "importance"})) {
    ++line;
    try {
      out.push_back({r[0], Quarter::parse(r[1]), parse_algorithm(r[2]), SignalId{r[3], parse_int(r[4], path, line)},
                     parse_double(r[5], path, line)});
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      if (msg.rfind(path.string(), 0) == 0) throw;
      throw ValidationError(where(path, line) + ": " + msg);
    }
  }
  return out;
}

void write_importance(const fs::path& path, const std::vector<ImportanceRecord>& records) {
  auto os = open_out(path);
  os << "asset,quarter,algo,source,lag_week,importance\n";
  for (const auto& r : records) {
    os << r.asset << ',' << r.quarter.str() << ',' << to_string(r.algorithm) << ',' << r.signal.source << ','
       << r.signal.lag_week << ',' << format_double(r.importance) << '\n';
  }
}

void write_portfolios(const fs::path& path, const std::vector<NamedSeries>& series) {
  auto os = open_out(path);
  os << "date,name,ret,turnover\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.series.size(); ++i) {
      os << format_date(s.series.dates[i]) << ',' << s.name << ',' << format_double(s.series.returns[i]) << ',';
      if (s.series.has_turnover() && s.series.turnover[i]) os << format_double(*s.series.turnover[i]);
      os << '\n';
    }
  }
}

FactorSeries read_factors(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw MissingInputError("missing input file: " + path.string());
  std::string header;
  std::getline(is, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  auto cols = split(header);
  if (cols.size() < 2 || cols[0] != "date") throw ValidationError(path.string() + ": expected header 'date,<factor>...'");
  is.close();
  FactorSeries f;
  f.names.assign(cols.begin() + 1, cols.end());
  std::size_t line = 1;
  for (const auto& r : read_csv(path, cols)) {
    ++line;
    std::vector<double> v;
    for (std::size_t j = 1; j < r.size(); ++j) v.push_back(parse_double(r[j], path, line));
    f.rows[parse_date_at(r[0], path, line)] = std::move(v);
  }
  return f;
}

void write_factors(const fs::path& path, const FactorSeries& factors) {
  auto os = open_out(path);
  os << "date";
  for (const auto& n : factors.names) os << ',' << n;
  os << '\n';
  for (const auto& [d, v] : factors.rows) {
    os << format_date(d);
    for (double x : v) os << ',' << format_double(x);
    os << '\n';
  }
}

std::map<Date, double> read_rf(const fs::path& path) {
  std::map<Date, double> out;
  std::size_t line = 1;
  for (const auto& r : read_csv(path, {"date", "rf"})) {
    ++line;
    out[parse_date_at(r[0], path, line)] = parse_double(r[1], path, line);
  }
  return out;
}

void write_rf(const fs::path& path, const std::map<Date, double>& rf) {
  auto os = open_out(path);
  os << "date,rf\n";
  for (const auto& [d, v] : rf) os << format_date(d) << ',' << format_double(v) << '\n';
}

void write_truth(const fs::path& path, const GroundTruth& truth) {
  auto os = open_out(path);
  os << "asset,source,lag_week,loading\n";
  for (const auto& [a, load] : truth.loadings) {
    for (const auto& [id, w] : load) os << a << ',' << id.source << ',' << id.lag_week << ',' << format_double(w) << '\n';
  }
}

void write_scenario(const fs::path& dir, const Scenario& sc) {
  fs::create_directories(dir);
  write_return_panel(dir / "returns.csv", sc.assets);
  write_return_panel(dir / "markets.csv", sc.markets);
  write_calendar(dir / "calendar.csv", sc.calendar);
  write_caps(dir / "caps.csv", sc.cap_rows);
  write_factors(dir / "factors.csv", sc.factors);
  write_rf(dir / "rf.csv", sc.rf);
  write_truth(dir / "truth.csv", sc.truth);
}

void write_text(const fs::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
}

}  // namespace sigradar::io
