#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sigradar/calendar.hpp"
#include "sigradar/panel.hpp"

namespace sigradar {

struct AssetForecast {
  std::string asset;
  double yhat = 0.0;
};

struct Memberships {
  std::vector<std::string> top;
  std::vector<std::string> bottom;
  std::vector<std::vector<std::string>> deciles;  // deciles[0] = Low (1) ... deciles[9] = High (10)
  std::string diagnostic;                         // set when too few names were available
};

struct Selection {
  enum class Mode { fraction, deciles };
  Mode mode = Mode::fraction;
  double fraction = 0.05;

  static Selection top_bottom(double f) { return {Mode::fraction, f}; }
  static Selection decile_sort() { return {Mode::deciles, 0.1}; }
};

/// Top set = ceil(f*n) highest forecasts, bottom = ceil(f*n) lowest. Ties go to
/// the smaller asset id.
Memberships rank_select(std::vector<AssetForecast> forecasts, const Selection& selection);

enum class Side { long_only, long_short_leg };

struct DailyWeights {
  Date date;
  std::map<std::string, double> weights;
  Side side = Side::long_only;

  double total() const;
};

struct PortfolioSeries {
  std::vector<Date> dates;
  std::vector<double> returns;
  std::vector<std::optional<double>> turnover;  // empty when not tracked; nullopt on the first day

  std::size_t size() const { return dates.size(); }
  bool has_turnover() const { return !turnover.empty(); }
  double mean() const;
  double mean_turnover() const;
};

// Previous-close market caps keyed by (date, asset).
class CapTable {
 public:
  void add(Date date, const std::string& asset, double cap);
  std::optional<double> get(Date date, const std::string& asset) const;
  bool empty() const { return caps_.empty(); }

 private:
  std::map<std::pair<Date, std::string>, double> caps_;
};

enum class Weighting { equal, value };

struct HoldingDay {
  Date date;
  std::vector<std::string> members;
};

struct BuiltPortfolio {
  PortfolioSeries series;
  std::vector<DailyWeights> weights;
};

/// Daily return = sum w * r with weights fixed at the prior close. Value weights
/// use the cap on the previous trading day of `calendar`. Turnover is computed
/// between consecutive holding days.
BuiltPortfolio build_series(const std::vector<HoldingDay>& holdings, const ReturnPanel& realized,
                            Weighting weighting, const CapTable* caps = nullptr,
                            const TradingCalendar* calendar = nullptr);

/// Per-date top minus bottom. Dates must match exactly.
PortfolioSeries long_short(const PortfolioSeries& top, const PortfolioSeries& bottom);

/// Per-date arithmetic mean of member returns. Dates must match exactly.
PortfolioSeries combine(const std::vector<PortfolioSeries>& series);

/// Average of several portfolios' weights on one date.
DailyWeights combine_weights(const std::vector<DailyWeights>& weights);

/// Half the L1 distance between today's weights and the prior weights drifted
/// by today's returns. Long-only weights only; result lies in [0, 1].
double turnover(const DailyWeights& previous, const std::map<std::string, double>& returns,
                const DailyWeights& today);

std::vector<std::optional<double>> turnover_series(const std::vector<DailyWeights>& weights,
                                                   const ReturnPanel& realized);

inline constexpr double kDefaultCostBps = 6.24;

/// net = gross - cost_bps * 1e-4 * turnover. Days without a turnover value pay no cost.
PortfolioSeries apply_costs(const PortfolioSeries& gross, double cost_bps = kDefaultCostBps);

struct PerformanceStats {
  double mean_excess = 0.0;
  double sharpe = 0.0;  // annualized with sqrt(252)
  double max_quarter_loss = 0.0;  // most negative compounded calendar-quarter return
  double t_stat = 0.0;            // mean excess / standard error
  std::size_t days = 0;
};

/// rf maps date -> daily risk-free rate; an empty map means zero.
PerformanceStats performance_stats(const PortfolioSeries& series, const std::map<Date, double>& rf = {});

/// Cap-weighted mean of available forecasts.
double bottom_up_index_forecast(const std::map<std::string, double>& forecasts,
                                const std::map<std::string, double>& caps);

struct TimingDay {
  Date date;
  std::vector<double> forecasts;  // one bottom-up index forecast per algorithm
  double index_return = 0.0;
};

/// upside_leverage when every forecast is > 0, -1 when every forecast is < 0, 1 otherwise.
double timing_exposure(const std::vector<double>& forecasts, double upside_leverage);

/// Exposure * index return per day; turnover 1 on days the exposure changes.
PortfolioSeries market_timing(const std::vector<TimingDay>& days, double upside_leverage);

}  // namespace sigradar
