#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sigradar/calendar.hpp"

namespace sigradar {

struct Observation {
  Date date;
  double ret = 0.0;  // simple return, decimal
};

/// Date x entity table of simple daily returns. Used for both the assets being
/// forecast and the foreign sources that feed the signals.
class ReturnPanel {
 public:
  /// Adds one observation. Throws ValidationError for a return <= -1, a
  /// non-finite return, or a duplicate (date, entity).
  void add(Date date, const std::string& entity, double ret);

  std::vector<std::string> entities() const;
  bool has(const std::string& entity) const { return series_.count(entity) != 0; }
  std::span<const Observation> series(const std::string& entity) const;
  std::optional<double> ret_on(const std::string& entity, Date date) const;
  // Union of all observation dates, ascending.
  std::vector<Date> dates() const;
  std::size_t entity_count() const { return series_.size(); }
  std::size_t observation_count() const;
  bool empty() const { return series_.empty(); }

 private:
  std::map<std::string, std::vector<Observation>> series_;
};

struct SignalId {
  std::string source;
  int lag_week = 1;

  std::string str() const { return source + "_w" + std::to_string(lag_week); }
  friend auto operator<=>(const SignalId&, const SignalId&) = default;
};

struct LaggedSignal {
  double value = 0.0;
  bool empty_window = false;  // no source trading days fell inside the window
};

/// Compounded return of one source over the calendar-day window
/// [d - 7k, d - 7(k-1) - 1]. An empty window yields 0 with the flag set.
LaggedSignal lagged_weekly_signal(std::span<const Observation> source, Date d, int lag_week);

/// First and last calendar day touched by the lag-k window for date d.
std::pair<Date, Date> signal_window(Date d, int lag_week);

/// Signals for every (source, lag) evaluated once per date. Columns are
/// source-major in ascending source id, lags 1..L within a source.
class SignalTable {
 public:
  SignalTable(const ReturnPanel& sources, std::span<const Date> dates, int lags);

  const std::vector<SignalId>& columns() const { return columns_; }
  int lags() const { return lags_; }
  bool contains(Date d) const;
  // Row of signal values for d; throws ValidationError when d was not tabulated.
  std::span<const double> row(Date d) const;
  std::size_t empty_windows() const { return empty_windows_; }

 private:
  int lags_;
  std::vector<SignalId> columns_;
  std::vector<Date> dates_;
  std::vector<double> values_;  // row-major, dates_.size() x columns_.size()
  std::size_t empty_windows_ = 0;
};

struct RowKey {
  std::string asset;
  Date date;
};

struct SignalBlock {
  std::vector<RowKey> rows;
  std::vector<SignalId> columns;
  Eigen::MatrixXd values;  // rows x columns
  Eigen::VectorXd target;  // realized same-day return per row
  std::size_t empty_windows = 0;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return columns.size(); }
};

/// One row per (asset, date) in [first, last] where the asset has a return.
SignalBlock build_signal_block(const ReturnPanel& sources, const ReturnPanel& assets, Date first,
                               Date last, int lags);

/// Same as above, reusing a precomputed table. Rows whose date is not in the
/// table are skipped.
SignalBlock build_signal_block(const SignalTable& table, const ReturnPanel& assets,
                               std::span<const std::string> asset_ids, Date first, Date last);

struct StandardizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // sample sd (ddof = 1); 0 marks a constant column

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply_row(std::span<const double> row) const;
};

StandardizationStats fit_standardization(const Eigen::MatrixXd& x);
std::pair<SignalBlock, StandardizationStats> standardize(const SignalBlock& block);

struct WindowOptions {
  int window_quarters = 4;
  std::size_t min_rows = 60;
};

// A training window, or the reason it could not be formed.
struct TrainingWindow {
  std::optional<SignalBlock> block;
  std::string skip_reason;

  explicit operator bool() const { return block.has_value(); }
};

/// Rows are the asset's trading days in quarters T-(w-1)..T.
TrainingWindow assemble_training_window(const SignalTable& table, const ReturnPanel& assets,
                                        const std::string& asset, Quarter quarter,
                                        const WindowOptions& options = {});

}  // namespace sigradar
