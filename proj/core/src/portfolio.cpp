#include "sigradar/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigradar/error.hpp"

namespace sigradar {

Memberships rank_select(std::vector<AssetForecast> forecasts, const Selection& selection) {
  Memberships out;
  const std::size_t n = forecasts.size();
  // ascending forecast, ties by ascending id
  std::sort(forecasts.begin(), forecasts.end(), [](const AssetForecast& a, const AssetForecast& b) {
    return a.yhat != b.yhat ? a.yhat < b.yhat : a.asset < b.asset;
  });

  if (selection.mode == Selection::Mode::deciles) {
    if (n < 10) {
      out.diagnostic = "decile sort needs >= 10 forecasts, got " + std::to_string(n);
      return out;
    }
    out.deciles.resize(10);
    for (std::size_t i = 0; i < n; ++i) out.deciles[i * 10 / n].push_back(forecasts[i].asset);
    return out;
  }

  const double f = selection.fraction;
  if (!(f > 0.0 && f <= 0.5)) throw ValidationError("selection fraction must be in (0, 0.5]");
  const auto need = static_cast<std::size_t>(std::ceil(1.0 / f - 1e-9));
  if (n < need) {
    out.diagnostic = "fraction " + std::to_string(f) + " needs >= " + std::to_string(need) +
                     " forecasts, got " + std::to_string(n);
    return out;
  }
  const auto k = static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9));
  for (std::size_t i = 0; i < k; ++i) out.bottom.push_back(forecasts[i].asset);
  // top: descending forecast, ties still by ascending id
  std::stable_sort(forecasts.begin(), forecasts.end(), [](const AssetForecast& a, const AssetForecast& b) {
    return a.yhat > b.yhat;
  });
  for (std::size_t i = 0; i < k; ++i) out.top.push_back(forecasts[i].asset);
  return out;
}

double DailyWeights::total() const {
  double s = 0.0;
  for (const auto& [id, w] : weights) s += w;
  return s;
}

double PortfolioSeries::mean() const {
  if (returns.empty()) return 0.0;
  return std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
}

double PortfolioSeries::mean_turnover() const {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& t : turnover) {
    if (t) {
      s += *t;
      ++n;
    }
  }
  return n == 0 ? 0.0 : s / static_cast<double>(n);
}

void CapTable::add(Date date, const std::string& asset, double cap) {
  if (!(cap > 0.0) || !std::isfinite(cap)) {
    throw ValidationError("market cap for " + asset + " on " + format_date(date) + " must be > 0");
  }
  caps_[{date, asset}] = cap;
}

std::optional<double> CapTable::get(Date date, const std::string& asset) const {
  auto it = caps_.find({date, asset});
  if (it == caps_.end()) return std::nullopt;
  return it->second;
}

double turnover(const DailyWeights& previous, const std::map<std::string, double>& returns,
                const DailyWeights& today) {
  for (const auto* w : {&previous, &today}) {
    for (const auto& [id, v] : w->weights) {
      if (v < 0.0) throw ValidationError("turnover is defined for long-only weights (" + id + ")");
    }
  }
  double grown_total = 0.0;
  std::map<std::string, double> drifted;
  for (const auto& [id, w] : previous.weights) {
    auto it = returns.find(id);
    const double g = w * (1.0 + (it == returns.end() ? 0.0 : it->second));
    drifted[id] = g;
    grown_total += g;
  }
  if (grown_total > 0.0) {
    for (auto& [id, g] : drifted) g /= grown_total;
  }
  double dist = 0.0;
  for (const auto& [id, w] : today.weights) {
    auto it = drifted.find(id);
    dist += std::abs(w - (it == drifted.end() ? 0.0 : it->second));
  }
  for (const auto& [id, g] : drifted) {
    if (today.weights.count(id) == 0) dist += std::abs(g);
  }
  return 0.5 * dist;
}

std::vector<std::optional<double>> turnover_series(const std::vector<DailyWeights>& weights,
                                                   const ReturnPanel& realized) {
  std::vector<std::optional<double>> out(weights.size());
  for (std::size_t k = 1; k < weights.size(); ++k) {
    const auto& prev = weights[k - 1];
    std::map<std::string, double> r;
    for (const auto& [id, w] : prev.weights) {
      if (auto v = realized.ret_on(id, prev.date)) r[id] = *v;
    }
    out[k] = turnover(prev, r, weights[k]);
  }
  return out;
}

BuiltPortfolio build_series(const std::vector<HoldingDay>& holdings, const ReturnPanel& realized,
                            Weighting weighting, const CapTable* caps, const TradingCalendar* calendar) {
  if (weighting == Weighting::value && (caps == nullptr || calendar == nullptr)) {
    throw ValidationError("value weighting needs market caps and a trading calendar");
  }
  BuiltPortfolio out;
  for (const auto& day : holdings) {
    if (day.members.empty()) continue;
    if (!out.series.dates.empty() && !(out.series.dates.back() < day.date)) {
      throw ValidationError("holding days must be strictly increasing");
    }
    DailyWeights w{day.date, {}, Side::long_only};
    if (weighting == Weighting::equal) {
      const double each = 1.0 / static_cast<double>(day.members.size());
      for (const auto& id : day.members) w.weights[id] = each;
    } else {
      const auto prev = calendar->previous(day.date);
      if (!prev) throw ValidationError("no prior trading day for value weights on " + format_date(day.date));
      double total = 0.0;
      for (const auto& id : day.members) {
        const auto cap = caps->get(*prev, id);
        if (!cap) {
          throw ValidationError("missing market cap for " + id + " on " + format_date(*prev));
        }
        w.weights[id] = *cap;
        total += *cap;
      }
      for (auto& [id, v] : w.weights) v /= total;
    }
    double ret = 0.0;
    for (const auto& [id, weight] : w.weights) {
      const auto r = realized.ret_on(id, day.date);
      if (!r) throw ValidationError("missing realized return for " + id + " on " + format_date(day.date));
      ret += weight * *r;
    }
    out.series.dates.push_back(day.date);
    out.series.returns.push_back(ret);
    out.weights.push_back(std::move(w));
  }
  out.series.turnover = turnover_series(out.weights, realized);
  return out;
}

namespace {

void require_same_dates(const PortfolioSeries& a, const PortfolioSeries& b) {
  if (a.dates != b.dates) {
    std::string detail;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (a.dates[i] != b.dates[i]) {
        detail = " (first mismatch at " + format_date(std::min(a.dates[i], b.dates[i])) + ")";
        break;
      }
    }
    throw ValidationError("portfolio series dates do not align" + detail);
  }
}

}  // namespace

PortfolioSeries long_short(const PortfolioSeries& top, const PortfolioSeries& bottom) {
  require_same_dates(top, bottom);
  PortfolioSeries out;
  out.dates = top.dates;
  out.returns.resize(top.size());
  for (std::size_t i = 0; i < top.size(); ++i) out.returns[i] = top.returns[i] - bottom.returns[i];
  return out;
}

PortfolioSeries combine(const std::vector<PortfolioSeries>& series) {
  if (series.empty()) throw ValidationError("nothing to combine");
  for (const auto& s : series) require_same_dates(series.front(), s);
  PortfolioSeries out;
  out.dates = series.front().dates;
  out.returns.assign(out.dates.size(), 0.0);
  const double k = static_cast<double>(series.size());
  for (std::size_t i = 0; i < out.dates.size(); ++i) {
    double s = 0.0;
    for (const auto& p : series) s += p.returns[i];
    out.returns[i] = s / k;
  }
  return out;
}

DailyWeights combine_weights(const std::vector<DailyWeights>& weights) {
  if (weights.empty()) throw ValidationError("nothing to combine");
  DailyWeights out{weights.front().date, {}, weights.front().side};
  const double k = static_cast<double>(weights.size());
  for (const auto& w : weights) {
    if (w.date != out.date) throw ValidationError("cannot combine weights from different dates");
    for (const auto& [id, v] : w.weights) out.weights[id] += v / k;
  }
  return out;
}

PortfolioSeries apply_costs(const PortfolioSeries& gross, double cost_bps) {
  if (!(cost_bps >= 0.0)) throw ValidationError("cost_bps must be >= 0");
  PortfolioSeries net = gross;
  if (!gross.has_turnover()) return net;
  if (gross.turnover.size() != gross.returns.size()) throw ValidationError("turnover series length mismatch");
  for (std::size_t i = 0; i < net.returns.size(); ++i) {
    if (gross.turnover[i]) net.returns[i] -= cost_bps * 1e-4 * *gross.turnover[i];
  }
  return net;
}

PerformanceStats performance_stats(const PortfolioSeries& series, const std::map<Date, double>& rf) {
  const std::size_t n = series.size();
  if (n < 2) throw ValidationError("performance stats need at least 2 days");
  std::vector<double> excess(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r0 = 0.0;
    if (!rf.empty()) {
      auto it = rf.find(series.dates[i]);
      if (it == rf.end()) throw ValidationError("missing risk-free rate on " + format_date(series.dates[i]));
      r0 = it->second;
    }
    excess[i] = series.returns[i] - r0;
  }
  PerformanceStats s;
  s.days = n;
  s.mean_excess = std::accumulate(excess.begin(), excess.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double e : excess) ss += (e - s.mean_excess) * (e - s.mean_excess);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd < 1e-12) throw ValidationError("zero volatility");
  s.sharpe = s.mean_excess / sd * std::sqrt(252.0);
  s.t_stat = s.mean_excess / (sd / std::sqrt(static_cast<double>(n)));

  std::map<Quarter, double> growth;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = growth.try_emplace(Quarter::of(series.dates[i]), 1.0);
    it->second *= 1.0 + series.returns[i];
  }
  s.max_quarter_loss = std::numeric_limits<double>::infinity();
  for (const auto& [q, g] : growth) s.max_quarter_loss = std::min(s.max_quarter_loss, g - 1.0);
  return s;
}

double bottom_up_index_forecast(const std::map<std::string, double>& forecasts,
                                const std::map<std::string, double>& caps) {
  if (forecasts.empty()) throw ValidationError("no forecasts to aggregate");
  double num = 0.0, den = 0.0;
  for (const auto& [id, f] : forecasts) {
    auto it = caps.find(id);
    if (it == caps.end()) throw ValidationError("missing market cap for " + id);
    num += it->second * f;
    den += it->second;
  }
  if (!(den > 0.0)) throw ValidationError("total market cap must be positive");
  return num / den;
}

double timing_exposure(const std::vector<double>& forecasts, double upside_leverage) {
  if (forecasts.empty()) throw ValidationError("no index forecasts");
  const bool all_pos = std::all_of(forecasts.begin(), forecasts.end(), [](double f) { return f > 0.0; });
  const bool all_neg = std::all_of(forecasts.begin(), forecasts.end(), [](double f) { return f < 0.0; });
  if (all_pos) return upside_leverage;
  if (all_neg) return -1.0;
  return 1.0;
}

PortfolioSeries market_timing(const std::vector<TimingDay>& days, double upside_leverage) {
  if (!(upside_leverage > 0.0)) throw ValidationError("upside leverage must be positive");
  PortfolioSeries out;
  double prev = 0.0;
  for (std::size_t i = 0; i < days.size(); ++i) {
    const double e = timing_exposure(days[i].forecasts, upside_leverage);
    out.dates.push_back(days[i].date);
    out.returns.push_back(e * days[i].index_return);
    out.turnover.push_back(i == 0 ? std::nullopt : std::optional<double>(e != prev ? 1.0 : 0.0));
    prev = e;
  }
  return out;
}

}  // namespace sigradar
