#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sigradar/calendar.hpp"
#include "sigradar/hyperparameters.hpp"
#include "sigradar/panel.hpp"
#include "sigradar/portfolio.hpp"
#include "sigradar/radar.hpp"

namespace sigradar {

// Forecast-sorted strategies assembled from radar output.

struct LongShort {
  BuiltPortfolio top;
  BuiltPortfolio bottom;
  // top - bottom; turnover is the mean of the two legs' turnover
  PortfolioSeries series;
};

struct PortfolioInputs {
  const ReturnPanel* realized = nullptr;
  Weighting weighting = Weighting::equal;
  const CapTable* caps = nullptr;
  const TradingCalendar* calendar = nullptr;
};

/// Top/bottom fraction portfolios per algorithm. Dates with too few forecasts are skipped.
std::map<Algorithm, LongShort> long_short_portfolios(const std::vector<Forecast>& forecasts, double fraction,
                                                     const PortfolioInputs& in);

/// Equal-weighted average of the algorithm portfolios on the dates they all share.
/// Leg turnover is computed on the averaged weights.
LongShort combined_portfolio(const std::map<Algorithm, LongShort>& by_algorithm, const PortfolioInputs& in);

/// deciles[0] = Low (1) ... deciles[9] = High (10).
std::map<Algorithm, std::vector<PortfolioSeries>> decile_portfolios(const std::vector<Forecast>& forecasts,
                                                                    const PortfolioInputs& in);

/// Cap-weighted realized return of all assets trading on each date, caps from the prior trading day.
std::map<Date, double> index_returns(const ReturnPanel& realized, const std::map<Date, std::map<std::string, double>>& caps,
                                     const TradingCalendar& calendar);

/// One TimingDay per date on which every algorithm has a bottom-up forecast.
std::vector<TimingDay> timing_days(const std::vector<Forecast>& forecasts,
                                   const std::map<Date, std::map<std::string, double>>& caps,
                                   const TradingCalendar& calendar, const std::map<Date, double>& index);

// Forecasts grouped by algorithm, then date.
std::map<Algorithm, std::map<Date, std::vector<AssetForecast>>> group_forecasts(const std::vector<Forecast>& forecasts);

}  // namespace sigradar
