#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sigradar/calendar.hpp"
#include "sigradar/econometrics.hpp"
#include "sigradar/panel.hpp"
#include "sigradar/portfolio.hpp"

namespace sigradar {

enum class DecayKind { geometric, linear, custom };

/// Per-lag weights for lags 1..L. geometric: rho^(k-1); linear: (L-k+1) / (L(L+1)/2);
/// custom: `weights` as given (nonnegative, length L).
std::vector<double> decay_profile(DecayKind kind, int lags, double rho = 0.5,
                                  const std::vector<double>& weights = {});

struct ScenarioSpec {
  int n_assets = 20;
  int n_markets = 5;
  int days_per_quarter = 63;  // first N weekdays of each calendar quarter
  int n_quarters = 8;
  Quarter start{2010, 1};
  double exposed_fraction = 1.0;
  int lags = 4;
  std::vector<double> profile{1.0, 0.5, 0.25, 0.125};  // per-lag weight, length lags
  int markets_per_asset = 0;  // 0 = every market
  // loading = sign * U(loading_min, loading_max) * profile[k]; sign is +/- with equal odds
  // unless positive_loadings is set
  double loading_min = 0.1;
  double loading_max = 0.1;
  bool positive_loadings = false;
  double interaction = 0.0;  // coefficient on signal(m0, lag 1) * signal(m1, lag 1), exposed assets only
  double market_sd = 0.01;   // daily foreign market return sd
  double noise_sd = 0.0;     // idiosyncratic daily sd
  double beta = 0.0;         // loading on the MKT factor
  double factor_sd = 0.01;
  double rf_daily = 0.0;
  std::map<int, double> regime_breaks;  // quarter offset from start -> loading multiplier
  std::uint64_t seed = 1;

  void validate() const;
};

struct GroundTruth {
  std::map<std::string, bool> exposed;
  std::map<std::string, std::map<SignalId, double>> loadings;  // exposed assets only
  double interaction = 0.0;
  std::vector<std::string> interaction_sources;  // the two lag-1 sources multiplied
};

struct Scenario {
  ScenarioSpec spec;
  ReturnPanel assets;
  ReturnPanel markets;
  TradingCalendar calendar;
  FactorSeries factors;  // MKT SMB HML MOM RMW CMA on asset trading days
  std::map<Date, double> rf;
  CapTable caps;
  std::map<Date, std::map<std::string, double>> cap_rows;  // same values as caps, iterable
  GroundTruth truth;
};

/// Builds a scenario whose exposed assets follow the planted loadings applied to
/// lagged_weekly_signal. Deterministic per spec.seed.
Scenario generate(const ScenarioSpec& spec);

}  // namespace sigradar
