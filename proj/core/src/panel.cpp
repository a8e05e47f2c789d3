#include "sigradar/panel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sigradar {

namespace {

bool by_date(const Observation& o, Date d) { return o.date < d; }

}  // namespace

void ReturnPanel::add(Date date, const std::string& entity, double ret) {
  if (entity.empty()) throw ValidationError("empty entity id");
  if (!std::isfinite(ret) || ret <= -1.0) {
    throw ValidationError("return for " + entity + " on " + format_date(date) +
                          " must be finite and > -1");
  }
  auto& s = series_[entity];
  if (s.empty() || s.back().date < date) {
    s.push_back({date, ret});
    return;
  }
  auto it = std::lower_bound(s.begin(), s.end(), date, by_date);
  if (it != s.end() && it->date == date) {
    throw ValidationError("duplicate observation for " + entity + " on " + format_date(date));
  }
  s.insert(it, {date, ret});
}

std::vector<std::string> ReturnPanel::entities() const {
  std::vector<std::string> out;
  out.reserve(series_.size());
  for (const auto& [id, s] : series_) out.push_back(id);
  return out;
}

std::span<const Observation> ReturnPanel::series(const std::string& entity) const {
  auto it = series_.find(entity);
  if (it == series_.end()) return {};
  return it->second;
}

std::optional<double> ReturnPanel::ret_on(const std::string& entity, Date date) const {
  auto s = series(entity);
  auto it = std::lower_bound(s.begin(), s.end(), date, by_date);
  if (it == s.end() || it->date != date) return std::nullopt;
  return it->ret;
}

std::vector<Date> ReturnPanel::dates() const {
  std::set<Date> all;
  for (const auto& [id, s] : series_) {
    for (const auto& o : s) all.insert(o.date);
  }
  return {all.begin(), all.end()};
}

std::size_t ReturnPanel::observation_count() const {
  std::size_t n = 0;
  for (const auto& [id, s] : series_) n += s.size();
  return n;
}

std::pair<Date, Date> signal_window(Date d, int lag_week) {
  return {d - Days{7 * lag_week}, d - Days{7 * (lag_week - 1) + 1}};
}

LaggedSignal lagged_weekly_signal(std::span<const Observation> source, Date d, int lag_week) {
  if (lag_week < 1) throw ValidationError("lag_week must be >= 1");
  const auto [first, last] = signal_window(d, lag_week);
  auto lo = std::lower_bound(source.begin(), source.end(), first, by_date);
  double growth = 1.0;
  bool any = false;
  for (auto it = lo; it != source.end() && it->date <= last; ++it) {
    growth *= 1.0 + it->ret;
    any = true;
  }
  if (!any) return {0.0, true};
  return {growth - 1.0, false};
}

SignalTable::SignalTable(const ReturnPanel& sources, std::span<const Date> dates, int lags)
    : lags_(lags), dates_(dates.begin(), dates.end()) {
  if (lags < 1) throw ValidationError("lag count must be >= 1");
  if (sources.empty()) throw ValidationError("no signals");
  if (!std::is_sorted(dates_.begin(), dates_.end()) ||
      std::adjacent_find(dates_.begin(), dates_.end()) != dates_.end()) {
    throw ValidationError("signal dates must be strictly increasing");
  }
  const auto ids = sources.entities();
  for (const auto& id : ids) {
    for (int k = 1; k <= lags; ++k) columns_.push_back({id, k});
  }
  const std::size_t width = columns_.size();
  values_.resize(dates_.size() * width);
  for (std::size_t r = 0; r < dates_.size(); ++r) {
    std::size_t c = 0;
    for (const auto& id : ids) {
      const auto s = sources.series(id);
      for (int k = 1; k <= lags; ++k, ++c) {
        const LaggedSignal sig = lagged_weekly_signal(s, dates_[r], k);
        values_[r * width + c] = sig.value;
        if (sig.empty_window) ++empty_windows_;
      }
    }
  }
}

bool SignalTable::contains(Date d) const {
  return std::binary_search(dates_.begin(), dates_.end(), d);
}

std::span<const double> SignalTable::row(Date d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.end() || *it != d) {
    throw ValidationError("no signals tabulated for " + format_date(d));
  }
  const std::size_t width = columns_.size();
  const auto r = static_cast<std::size_t>(it - dates_.begin());
  return std::span<const double>(values_).subspan(r * width, width);
}

SignalBlock build_signal_block(const SignalTable& table, const ReturnPanel& assets,
                               std::span<const std::string> asset_ids, Date first, Date last) {
  SignalBlock block;
  block.columns = table.columns();
  std::vector<std::pair<RowKey, double>> keyed;
  for (const auto& id : asset_ids) {
    const auto s = assets.series(id);
    auto lo = std::lower_bound(s.begin(), s.end(), first, by_date);
    for (auto it = lo; it != s.end() && it->date <= last; ++it) {
      if (table.contains(it->date)) keyed.push_back({{id, it->date}, it->ret});
    }
  }
  const auto width = static_cast<Eigen::Index>(block.columns.size());
  block.values.resize(static_cast<Eigen::Index>(keyed.size()), width);
  block.target.resize(static_cast<Eigen::Index>(keyed.size()));
  block.rows.reserve(keyed.size());
  for (std::size_t r = 0; r < keyed.size(); ++r) {
    const auto row = table.row(keyed[r].first.date);
    for (Eigen::Index c = 0; c < width; ++c) {
      block.values(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    }
    block.target(static_cast<Eigen::Index>(r)) = keyed[r].second;
    block.rows.push_back(std::move(keyed[r].first));
  }
  return block;
}

SignalBlock build_signal_block(const ReturnPanel& sources, const ReturnPanel& assets, Date first,
                               Date last, int lags) {
  if (sources.empty()) throw ValidationError("no signals");
  std::vector<Date> dates;
  for (Date d : assets.dates()) {
    if (first <= d && d <= last) dates.push_back(d);
  }
  const SignalTable table(sources, dates, lags);
  const auto ids = assets.entities();
  SignalBlock block = build_signal_block(table, assets, ids, first, last);
  block.empty_windows = table.empty_windows();
  return block;
}

StandardizationStats fit_standardization(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw ValidationError("standardization needs at least 2 rows");
  StandardizationStats stats;
  stats.mean = x.colwise().mean().transpose();
  stats.sd.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double ss = (x.col(c).array() - stats.mean(c)).square().sum();
    double sd = std::sqrt(ss / static_cast<double>(x.rows() - 1));
    // treat round-off level spread as a constant column
    if (sd <= 1e-14 * std::max(1.0, std::abs(stats.mean(c)))) sd = 0.0;
    stats.sd(c) = sd;
  }
  return stats;
}

Eigen::MatrixXd StandardizationStats::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    throw ValidationError("column mismatch: model expects " + std::to_string(mean.size()) +
                          " features, got " + std::to_string(x.cols()));
  }
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (sd(c) == 0.0) {
      out.col(c).setZero();
    } else {
      out.col(c) = (x.col(c).array() - mean(c)) / sd(c);
    }
  }
  return out;
}

Eigen::VectorXd StandardizationStats::apply_row(std::span<const double> row) const {
  const Eigen::Map<const Eigen::RowVectorXd> r(row.data(), static_cast<Eigen::Index>(row.size()));
  return apply(Eigen::MatrixXd(r)).row(0).transpose();
}

std::pair<SignalBlock, StandardizationStats> standardize(const SignalBlock& block) {
  if (block.values.rows() < 2) throw ValidationError("cannot standardize a single-row block");
  StandardizationStats stats = fit_standardization(block.values);
  SignalBlock out = block;
  out.values = stats.apply(block.values);
  return {std::move(out), std::move(stats)};
}

TrainingWindow assemble_training_window(const SignalTable& table, const ReturnPanel& assets,
                                        const std::string& asset, Quarter quarter,
                                        const WindowOptions& options) {
  if (options.window_quarters < 1) throw ValidationError("window_quarters must be >= 1");
  TrainingWindow out;
  if (!assets.has(asset)) {
    out.skip_reason = "asset " + asset + " not in panel";
    return out;
  }
  const Date first = (quarter - (options.window_quarters - 1)).first_day();
  const Date last = quarter.last_day();
  const std::string ids[] = {asset};
  SignalBlock block = build_signal_block(table, assets, ids, first, last);
  if (block.row_count() < options.min_rows) {
    out.skip_reason = "training window has " + std::to_string(block.row_count()) +
                      " rows (< " + std::to_string(options.min_rows) + ")";
    return out;
  }
  out.block = std::move(block);
  return out;
}

}  // namespace sigradar
