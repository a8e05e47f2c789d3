#include "sigradar/strategy.hpp"

#include <algorithm>
#include <set>

#include "sigradar/error.hpp"

namespace sigradar {

std::map<Algorithm, std::map<Date, std::vector<AssetForecast>>> group_forecasts(const std::vector<Forecast>& forecasts) {
  std::map<Algorithm, std::map<Date, std::vector<AssetForecast>>> out;
  for (const auto& f : forecasts) out[f.algorithm][f.date].push_back({f.asset, f.yhat});
  return out;
}

namespace {

void require_realized(const PortfolioInputs& in) {
  if (in.realized == nullptr) throw ValidationError("portfolio inputs need realized returns");
}

std::optional<double> mean_of(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return 0.5 * (*a + *b);
}

PortfolioSeries spread(const BuiltPortfolio& top, const BuiltPortfolio& bottom) {
  PortfolioSeries s = long_short(top.series, bottom.series);
  s.turnover.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) s.turnover[i] = mean_of(top.series.turnover[i], bottom.series.turnover[i]);
  return s;
}

BuiltPortfolio from_weights(std::vector<DailyWeights> weights, const ReturnPanel& realized) {
  BuiltPortfolio out;
  for (const auto& w : weights) {
    double r = 0.0;
    for (const auto& [id, v] : w.weights) {
      const auto x = realized.ret_on(id, w.date);
      if (!x) throw ValidationError("missing realized return for " + id + " on " + format_date(w.date));
      r += v * *x;
    }
    out.series.dates.push_back(w.date);
    out.series.returns.push_back(r);
  }
  out.weights = std::move(weights);
  out.series.turnover = turnover_series(out.weights, realized);
  return out;
}

}  // namespace

std::map<Algorithm, LongShort> long_short_portfolios(const std::vector<Forecast>& forecasts, double fraction,
                                                     const PortfolioInputs& in) {
  require_realized(in);
  std::map<Algorithm, LongShort> out;
  for (const auto& [algo, by_date] : group_forecasts(forecasts)) {
    std::vector<HoldingDay> top, bottom;
    for (const auto& [d, fc] : by_date) {
      const Memberships m = rank_select(fc, Selection::top_bottom(fraction));
      if (m.top.empty()) continue;
      top.push_back({d, m.top});
      bottom.push_back({d, m.bottom});
    }
    if (top.empty()) continue;
    LongShort ls;
    ls.top = build_series(top, *in.realized, in.weighting, in.caps, in.calendar);
    ls.bottom = build_series(bottom, *in.realized, in.weighting, in.caps, in.calendar);
    ls.series = spread(ls.top, ls.bottom);
    out[algo] = std::move(ls);
  }
  return out;
}

LongShort combined_portfolio(const std::map<Algorithm, LongShort>& by_algorithm, const PortfolioInputs& in) {
  require_realized(in);
  if (by_algorithm.empty()) throw ValidationError("no portfolios to combine");
  std::set<Date> common(by_algorithm.begin()->second.top.series.dates.begin(),
                        by_algorithm.begin()->second.top.series.dates.end());
  for (const auto& [algo, ls] : by_algorithm) {
    const std::set<Date> mine(ls.top.series.dates.begin(), ls.top.series.dates.end());
    std::set<Date> keep;
    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(), std::inserter(keep, keep.end()));
    common = std::move(keep);
  }
  if (common.empty()) throw ValidationError("algorithm portfolios share no dates");

  auto leg = [&](bool top_leg) {
    std::map<Date, std::vector<DailyWeights>> per_date;
    for (const auto& [algo, ls] : by_algorithm) {
      for (const auto& w : (top_leg ? ls.top : ls.bottom).weights) {
        if (common.count(w.date)) per_date[w.date].push_back(w);
      }
    }
    std::vector<DailyWeights> merged;
    for (const auto& [d, ws] : per_date) merged.push_back(combine_weights(ws));
    return from_weights(std::move(merged), *in.realized);
  };
  LongShort out;
  out.top = leg(true);
  out.bottom = leg(false);
  out.series = spread(out.top, out.bottom);
  return out;
}

std::map<Algorithm, std::vector<PortfolioSeries>> decile_portfolios(const std::vector<Forecast>& forecasts,
                                                                    const PortfolioInputs& in) {
  require_realized(in);
  std::map<Algorithm, std::vector<PortfolioSeries>> out;
  for (const auto& [algo, by_date] : group_forecasts(forecasts)) {
    std::vector<std::vector<HoldingDay>> holdings(10);
    for (const auto& [d, fc] : by_date) {
      const Memberships m = rank_select(fc, Selection::decile_sort());
      if (m.deciles.empty()) continue;
      for (std::size_t k = 0; k < 10; ++k) holdings[k].push_back({d, m.deciles[k]});
    }
    if (holdings[0].empty()) continue;
    std::vector<PortfolioSeries> series;
    for (const auto& h : holdings) series.push_back(build_series(h, *in.realized, in.weighting, in.caps, in.calendar).series);
    out[algo] = std::move(series);
  }
  return out;
}

std::map<Date, double> index_returns(const ReturnPanel& realized, const std::map<Date, std::map<std::string, double>>& caps,
                                     const TradingCalendar& calendar) {
  std::map<Date, double> out;
  for (Date d : calendar.dates()) {
    const auto prev = calendar.previous(d);
    if (!prev) continue;
    auto it = caps.find(*prev);
    if (it == caps.end()) continue;
    double num = 0.0, den = 0.0;
    for (const auto& [asset, cap] : it->second) {
      const auto r = realized.ret_on(asset, d);
      if (!r) continue;
      num += cap * *r;
      den += cap;
    }
    if (den > 0.0) out[d] = num / den;
  }
  return out;
}

std::vector<TimingDay> timing_days(const std::vector<Forecast>& forecasts,
                                   const std::map<Date, std::map<std::string, double>>& caps,
                                   const TradingCalendar& calendar, const std::map<Date, double>& index) {
  const auto grouped = group_forecasts(forecasts);
  if (grouped.empty()) return {};
  std::vector<TimingDay> out;
  for (const auto& [d, first] : grouped.begin()->second) {
    auto idx = index.find(d);
    if (idx == index.end()) continue;
    const auto prev = calendar.previous(d);
    if (!prev) continue;
    auto cap_it = caps.find(*prev);
    if (cap_it == caps.end()) continue;
    TimingDay day{d, {}, idx->second};
    bool complete = true;
    for (const auto& [algo, by_date] : grouped) {
      auto f = by_date.find(d);
      if (f == by_date.end()) {
        complete = false;
        break;
      }
      std::map<std::string, double> fc;
      for (const auto& a : f->second) fc[a.asset] = a.yhat;
      day.forecasts.push_back(bottom_up_index_forecast(fc, cap_it->second));
    }
    if (complete) out.push_back(std::move(day));
  }
  return out;
}

}  // namespace sigradar
