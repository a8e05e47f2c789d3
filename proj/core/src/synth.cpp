#include "sigradar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigradar/error.hpp"
#include "sigradar/rng.hpp"

namespace sigradar {

std::vector<double> decay_profile(DecayKind kind, int lags, double rho, const std::vector<double>& weights) {
  if (lags < 1) throw ValidationError("decay profile needs L >= 1");
  std::vector<double> out(static_cast<std::size_t>(lags));
  switch (kind) {
    case DecayKind::geometric:
      if (!(rho >= 0.0)) throw ValidationError("geometric decay needs rho >= 0");
      for (int k = 0; k < lags; ++k) out[static_cast<std::size_t>(k)] = std::pow(rho, k);
      break;
    case DecayKind::linear: {
      const double total = lags * (lags + 1) / 2.0;
      for (int k = 0; k < lags; ++k) out[static_cast<std::size_t>(k)] = (lags - k) / total;
      break;
    }
    case DecayKind::custom:
      if (static_cast<int>(weights.size()) != lags) throw ValidationError("custom profile needs one weight per lag");
      for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("profile weights must be finite and >= 0");
      }
      out = weights;
      break;
  }
  return out;
}

void ScenarioSpec::validate() const {
  if (n_assets < 1) throw ValidationError("synth.n_assets must be >= 1");
  if (n_markets < 1) throw ValidationError("synth.n_markets must be >= 1");
  if (days_per_quarter < 1 || days_per_quarter > 64) throw ValidationError("synth.days_per_quarter must be in [1, 64]");
  if (n_quarters < 1) throw ValidationError("synth.n_quarters must be >= 1");
  if (!(exposed_fraction >= 0.0 && exposed_fraction <= 1.0)) throw ValidationError("synth.exposed_fraction must be in [0, 1]");
  if (lags < 1) throw ValidationError("synth.lags must be >= 1");
  if (static_cast<int>(profile.size()) != lags) throw ValidationError("synth.profile needs one weight per lag");
  for (double w : profile) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("synth.profile weights must be finite and >= 0");
  }
  if (markets_per_asset < 0 || markets_per_asset > n_markets) throw ValidationError("synth.markets_per_asset out of range");
  if (!(loading_min >= 0.0 && loading_max >= loading_min)) throw ValidationError("synth loading range is invalid");
  if (!(noise_sd >= 0.0)) throw ValidationError("synth.noise_sd must be >= 0");
  if (!(market_sd >= 0.0) || !(factor_sd >= 0.0)) throw ValidationError("synth sd values must be >= 0");
  if (interaction != 0.0 && n_markets < 2) throw ValidationError("an interaction needs at least 2 markets");
}

namespace {

std::string numbered(char prefix, int i, int count) {
  const int width = count < 10 ? 1 : static_cast<int>(std::floor(std::log10(count))) + 1;
  std::string digits = std::to_string(i + 1);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

bool weekday(Date d) {
  const std::chrono::weekday w{d};
  return w != std::chrono::Saturday && w != std::chrono::Sunday;
}

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  Scenario sc;
  sc.spec = spec;
  Rng root(spec.seed);
  Rng market_rng(root.fork());
  Rng loading_rng(root.fork());
  Rng factor_rng(root.fork());
  Rng noise_rng(root.fork());
  Rng cap_rng(root.fork());

  // asset calendar: first days_per_quarter weekdays of each quarter
  std::vector<Date> dates;
  for (int qi = 0; qi < spec.n_quarters; ++qi) {
    const Quarter q = spec.start + qi;
    int taken = 0;
    for (Date d = q.first_day(); d <= q.last_day() && taken < spec.days_per_quarter; d += Days{1}) {
      if (weekday(d)) {
        dates.push_back(d);
        ++taken;
      }
    }
  }
  sc.calendar = TradingCalendar(dates);

  std::vector<std::string> markets, assets;
  for (int m = 0; m < spec.n_markets; ++m) markets.push_back(numbered('M', m, spec.n_markets));
  for (int a = 0; a < spec.n_assets; ++a) assets.push_back(numbered('A', a, spec.n_assets));

  // foreign markets trade every weekday, starting early enough to fill every lag window
  const Date market_first = dates.front() - Days{7 * spec.lags};
  for (Date d = market_first; d <= dates.back(); d += Days{1}) {
    if (!weekday(d)) continue;
    for (const auto& m : markets) sc.markets.add(d, m, spec.market_sd * market_rng.normal());
  }

  // planted loadings
  const auto n_exposed = static_cast<std::size_t>(std::lround(spec.exposed_fraction * spec.n_assets));
  std::vector<std::size_t> order(assets.size());
  std::iota(order.begin(), order.end(), 0);
  loading_rng.shuffle(order);
  for (const auto& a : assets) sc.truth.exposed[a] = false;
  for (std::size_t i = 0; i < n_exposed; ++i) {
    const std::string& a = assets[order[i]];
    sc.truth.exposed[a] = true;
    std::vector<std::size_t> picks(markets.size());
    std::iota(picks.begin(), picks.end(), 0);
    std::size_t used = markets.size();
    if (spec.markets_per_asset > 0) {
      loading_rng.shuffle(picks);
      used = static_cast<std::size_t>(spec.markets_per_asset);
    }
    auto& load = sc.truth.loadings[a];
    for (std::size_t j = 0; j < used; ++j) {
      const double sign = spec.positive_loadings || loading_rng.uniform() < 0.5 ? 1.0 : -1.0;
      const double mag = loading_rng.uniform(spec.loading_min, spec.loading_max);
      for (int k = 1; k <= spec.lags; ++k) {
        const double w = sign * mag * spec.profile[static_cast<std::size_t>(k - 1)];
        if (w != 0.0) load[{markets[picks[j]], k}] = w;
      }
    }
  }
  sc.truth.interaction = spec.interaction;
  if (spec.interaction != 0.0) sc.truth.interaction_sources = {markets[0], markets[1]};

  // signal values on asset dates, the same construction the pipeline uses
  const SignalTable signals(sc.markets, dates, spec.lags);
  const auto& columns = signals.columns();
  auto column_of = [&](const SignalId& id) {
    return static_cast<std::size_t>(std::find(columns.begin(), columns.end(), id) - columns.begin());
  };
  std::size_t inter_a = 0, inter_b = 0;
  if (spec.interaction != 0.0) {
    inter_a = column_of({markets[0], 1});
    inter_b = column_of({markets[1], 1});
  }
  std::map<std::string, std::vector<std::pair<std::size_t, double>>> dense;
  for (const auto& [a, load] : sc.truth.loadings) {
    for (const auto& [id, w] : load) dense[a].push_back({column_of(id), w});
  }

  sc.factors.names = {"MKT", "SMB", "HML", "MOM", "RMW", "CMA"};
  for (Date d : dates) {
    std::vector<double> f(6);
    for (auto& v : f) v = spec.factor_sd * factor_rng.normal();
    sc.factors.rows[d] = f;
    sc.rf[d] = spec.rf_daily;
  }

  std::map<std::string, double> cap;
  for (const auto& a : assets) cap[a] = cap_rng.uniform(1.0, 100.0) * 1e9;

  for (Date d : dates) {
    const auto row = signals.row(d);
    const int qoff = static_cast<int>(Quarter::of(d).index() - spec.start.index());
    const auto br = spec.regime_breaks.find(qoff);
    const double mult = br == spec.regime_breaks.end() ? 1.0 : br->second;
    const double mkt = sc.factors.rows[d][0];
    for (const auto& a : assets) {
      double r = spec.beta * mkt;
      if (sc.truth.exposed[a]) {
        double planted = 0.0;
        auto it = dense.find(a);
        if (it != dense.end()) {
          for (const auto& [c, w] : it->second) planted += w * row[c];
        }
        if (spec.interaction != 0.0) planted += spec.interaction * row[inter_a] * row[inter_b];
        r += mult * planted;
      }
      if (spec.noise_sd > 0.0) r += spec.noise_sd * noise_rng.normal();
      if (!(r > -1.0)) throw ValidationError("scenario produced a return <= -1; reduce the loading or noise scale");
      sc.assets.add(d, a, r);
      cap[a] *= 1.0 + r;
      sc.caps.add(d, a, cap[a]);
      sc.cap_rows[d][a] = cap[a];
    }
  }
  return sc;
}

}  // namespace sigradar
