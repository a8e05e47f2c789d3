// Acceptance run: one line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sigradar/econometrics.hpp"
#include "sigradar/io.hpp"
#include "sigradar/linear.hpp"
#include "sigradar/portfolio.hpp"
#include "sigradar/radar.hpp"
#include "sigradar/shapley.hpp"
#include "sigradar/strategy.hpp"
#include "sigradar/synth.hpp"
#include "sigradar/tree.hpp"

using namespace sigradar;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks with a short note each.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (notes_.size() < 6) notes_.push_back(what);
    }
  }
  void note(const std::string& s) { info_.push_back(s); }
  Outcome result() const {
    std::string d;
    for (const auto& s : info_) d += (d.empty() ? "" : "; ") + s;
    for (const auto& s : notes_) d += (d.empty() ? "" : "; ") + std::string("failed: ") + s;
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
  std::vector<std::string> info_;
};

std::string num(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

MarketData data_of(const Scenario& sc) { return make_market_data(sc.assets, sc.markets, sc.calendar); }

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// ---- 1: trading-cost arithmetic ----

Outcome costs() {
  Checker c;
  const std::vector<double> gross{10.40, 9.66, 9.72, 9.70, 9.87};
  const std::vector<double> turn{0.328, 0.642, 0.558, 0.404, 0.422};
  const std::vector<double> net{8.35, 5.65, 6.24, 7.18, 7.22};
  for (std::size_t i = 0; i < gross.size(); ++i) {
    PortfolioSeries s;
    s.dates = {parse_date("2020-01-02"), parse_date("2020-01-03")};
    s.returns = {gross[i] * 1e-4, gross[i] * 1e-4};
    s.turnover = {turn[i], turn[i]};
    const double got = apply_costs(s).mean() * 1e4;
    c.note(num(gross[i]) + "->" + num(got));
    c.expect(std::abs(got - net[i]) <= 0.01 + 1e-9, "net " + num(got) + " vs " + num(net[i]));
  }
  PortfolioSeries flat;
  for (Date t = parse_date("2020-01-02"); flat.size() < 10; t += Days{1}) {
    flat.dates.push_back(t);
    flat.returns.push_back(7.22e-4);
  }
  const double annual = flat.mean() * 252.0;
  c.expect(std::abs(annual - 0.1819) / 0.1819 <= 1e-3, "annualized " + num(annual));
  return c.result();
}

// ---- 2: dissemination windows from published coefficients ----

Outcome windows() {
  Checker c;
  const std::vector<std::string> algo{"LASSO", "RF", "GB", "NN"};
  const std::vector<std::pair<double, double>> exp_pairs{{0.2065, -0.0021}, {0.9865, -0.0027}, {0.3364, -0.0004}, {3.6224, -0.0007}};
  const std::vector<int> exp_want{4, 5, 6, 8};
  const std::vector<std::pair<double, double>> lin_pairs{{0.2737, -0.0443}, {1.0663, -0.0550}, {0.3507, -0.0092}, {3.6720, -0.0261}};
  const std::vector<int> lin_want{6, 19, 38};
  for (std::size_t i = 0; i < 4; ++i) {
    const int e = dissemination_window(exp_pairs[i].first, exp_pairs[i].second, DecayForm::exponential);
    const int l = dissemination_window(lin_pairs[i].first, lin_pairs[i].second, DecayForm::linear);
    c.note(algo[i] + " " + std::to_string(e) + "/" + std::to_string(l));
    c.expect(e == exp_want[i], algo[i] + " exp window " + std::to_string(e));
    if (i < 3) {
      c.expect(std::abs(l - lin_want[i]) <= 1, algo[i] + " linear window " + std::to_string(l));
    } else {
      c.expect(l > 100, algo[i] + " linear window " + std::to_string(l));
    }
  }
  return c.result();
}

// ---- 3: LASSO against the soft-threshold oracle ----

Outcome lasso() {
  Checker c;
  Rng rng(303);
  double worst = 0.0, worst_kkt = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 40 + static_cast<int>(rng.index(80));
    const int p = 2 + static_cast<int>(rng.index(12));
    const MatrixXd x = oracle::orthonormal_design(n, p, rng);
    const VectorXd beta = oracle::random_matrix(p, 1, rng).col(0);
    const VectorXd y = 0.5 * x * beta + 0.3 * oracle::random_matrix(n, 1, rng).col(0) + VectorXd::Constant(n, rng.normal());
    const double alpha = 0.01 + 0.4 * rng.uniform();
    const LinearModel m = fit_lasso(x, y, alpha);
    const VectorXd yc = y.array() - y.mean();
    VectorXd want(p);
    for (int j = 0; j < p; ++j) want(j) = oracle::soft_threshold(x.col(j).dot(yc) / n, alpha);
    worst = std::max(worst, (m.coef - want).cwiseAbs().maxCoeff());
    worst_kkt = std::max(worst_kkt, kkt_violation(m, x, y, alpha));
  }
  // correlated designs: KKT only
  for (int rep = 0; rep < 20; ++rep) {
    MatrixXd x = oracle::random_matrix(100, 8, rng);
    x.col(1) = 0.8 * x.col(0) + 0.2 * x.col(1);
    const VectorXd y = x.col(0) - x.col(3) + 0.5 * oracle::random_matrix(100, 1, rng).col(0);
    const double alpha = 0.01 + 0.2 * rng.uniform();
    worst_kkt = std::max(worst_kkt, kkt_violation(fit_lasso(x, y, alpha), x, y, alpha));
  }
  c.note("max coef gap " + num(worst, 3) + ", max KKT " + num(worst_kkt, 3));
  c.expect(worst <= 1e-8, "oracle gap");
  c.expect(worst_kkt <= 1e-6, "KKT");
  return c.result();
}

// ---- 4: Shapley values ----

RegressionTree random_tree(int p, int depth, Rng& rng) {
  const MatrixXd x = oracle::random_matrix(80, p, rng);
  const VectorXd y = oracle::random_matrix(80, 1, rng).col(0);
  std::vector<std::size_t> rows(80);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return grow_tree(x, y, rows, {depth, 1, 1.0}, rng);
}

BatchPredictor as_predictor(const TreeEnsemble& e) {
  return [&e](const MatrixXd& x) { return e.predict(x); };
}

Outcome shapley() {
  Checker c;
  Rng rng(404);
  double worst = 0.0, worst_eff = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int p = 2 + static_cast<int>(rng.index(9));
    TreeEnsemble e;
    e.kind = rep % 2 == 0 ? TreeEnsemble::Kind::forest : TreeEnsemble::Kind::boosting;
    e.base = rng.normal();
    e.learning_rate = 0.3;
    const int trees = 1 + static_cast<int>(rng.index(3));
    for (int t = 0; t < trees; ++t) e.trees.push_back(random_tree(p, 2 + static_cast<int>(rng.index(4)), rng));
    const VectorXd x = oracle::random_matrix(p, 1, rng).col(0);
    const MatrixXd bg = oracle::random_matrix(1 + static_cast<int>(rng.index(6)), p, rng);
    const Attribution fast = tree_shap(e, x, bg);
    const Attribution slow = brute_force_shapley(as_predictor(e), x, bg);
    worst = std::max(worst, (fast.phi - slow.phi).cwiseAbs().maxCoeff());
    worst_eff = std::max(worst_eff, std::abs(fast.phi.sum() + fast.base_value - e.predict(x.transpose())(0)));
  }
  c.note("max tree/brute gap " + num(worst, 3));
  c.expect(worst <= 1e-9, "tree_shap vs brute force");
  c.expect(worst_eff <= 1e-9, "efficiency");

  // symmetry: a function symmetric in features 0 and 1, evaluated where they are equal
  {
    TreeEnsemble e;
    e.trees.push_back(RegressionTree({{0, 0.0, 1, 2, 0.0, 2}, {-1, 0, -1, -1, -1.0, 1}, {-1, 0, -1, -1, 2.0, 1}}));
    e.trees.push_back(RegressionTree({{1, 0.0, 1, 2, 0.0, 2}, {-1, 0, -1, -1, -1.0, 1}, {-1, 0, -1, -1, 2.0, 1}}));
    MatrixXd bg(3, 3);
    bg << -1, -1, 0.3, 0.5, 0.5, -2, -0.2, -0.2, 1;
    const VectorXd x = (VectorXd(3) << 0.7, 0.7, -1.0).finished();
    const Attribution a = tree_shap(e, x, bg);
    c.expect(std::abs(a.phi(0) - a.phi(1)) <= 1e-12, "symmetry");
    c.expect(a.phi(2) == 0.0, "dummy");
  }

  // linear attribution
  {
    LinearModel m;
    m.intercept = 0.4;
    m.coef = (VectorXd(4) << 1.5, -0.7, 0.0, 2.0).finished();
    const MatrixXd bg = oracle::random_matrix(9, 4, rng);
    const VectorXd x = oracle::random_matrix(4, 1, rng).col(0);
    const Attribution a = linear_shap(m, x, bg);
    const VectorXd mu = bg.colwise().mean().transpose();
    const VectorXd want = m.coef.cwiseProduct(x - mu);
    c.expect((a.phi - want).cwiseAbs().maxCoeff() <= 1e-12, "linear attribution");
    const BatchPredictor f = [&m](const MatrixXd& z) { return m.predict(z); };
    c.expect((brute_force_shapley(f, x, bg).phi - want).cwiseAbs().maxCoeff() <= 1e-12, "linear brute force");
  }
  return c.result();
}

// ---- 5: econometrics oracles ----

MatrixXd with_const(const MatrixXd& x) {
  MatrixXd out(x.rows(), x.cols() + 1);
  out << VectorXd::Ones(x.rows()), x;
  return out;
}

Outcome econometrics() {
  Checker c;
  double worst = 0.0;
  {
    MatrixXd x(6, 1);
    x << 1.0, 2.0, 3.5, 4.0, 6.0, 7.5;
    const VectorXd y = (VectorXd(6) << 1.2, 1.9, 3.9, 3.7, 6.8, 7.1).finished();
    const auto r = ols(y, with_const(x), {"const", "x"}, SeOptions::hc1());
    worst = std::max(worst, (r.se - oracle::hc1_se(with_const(x), y)).cwiseAbs().maxCoeff());
  }
  {
    MatrixXd x(10, 2);
    x << 0.3, 1, 1.1, 0, 2.2, 1, 2.9, 1, 4.1, 0, 5.3, 0, 5.8, 1, 7.2, 0, 8.1, 1, 9.4, 0;
    const VectorXd y = (VectorXd(10) << 0.5, 1.9, 2.1, 3.3, 4.5, 4.7, 6.6, 7.0, 7.9, 9.8).finished();
    const auto h = ols(y, with_const(x), {"const", "x", "z"}, SeOptions::hc1());
    worst = std::max(worst, (h.se - oracle::hc1_se(with_const(x), y)).cwiseAbs().maxCoeff());
    const std::vector<std::string> g{"a", "a", "b", "b", "b", "c", "c", "d", "d", "d"};
    const auto r = ols(y, with_const(x), {"const", "x", "z"}, SeOptions::cluster(g));
    worst = std::max(worst, (r.se - oracle::cr1_se(with_const(x), y, g)).cwiseAbs().maxCoeff());
  }
  c.note("max se gap " + num(worst, 3));
  c.expect(worst <= 1e-10, "sandwich standard errors");

  const std::vector<std::string> firm{"f1", "f1", "f1", "f2", "f2", "f2", "f3", "f3", "f3", "f4", "f4", "f4"};
  const std::vector<std::string> year{"y1", "y2", "y3", "y1", "y2", "y3", "y1", "y2", "y3", "y1", "y2", "y3"};
  MatrixXd x(12, 2);
  x << 0.2, 1, 1.3, 0, 2.1, 1, 0.7, 1, 1.1, 0, 3.2, 0, 0.1, 1, 2.5, 1, 2.2, 0, 1.9, 0, 0.4, 1, 2.8, 1;
  const VectorXd y = (VectorXd(12) << 1.0, 2.1, 3.3, 2.2, 2.4, 4.9, 0.7, 3.1, 3.3, 4.0, 2.5, 5.2).finished();
  double fe_gap = 0.0;
  for (const SeOptions& se : {SeOptions::classic(), SeOptions::hc1(), SeOptions::cluster(year)}) {
    const auto w = fe_regression(y, x, {"x", "z"}, {firm}, se, FeMethod::within);
    const auto d = fe_regression(y, x, {"x", "z"}, {firm}, se, FeMethod::dummies);
    fe_gap = std::max({fe_gap, (w.coef - d.coef).cwiseAbs().maxCoeff(), (w.se - d.se).cwiseAbs().maxCoeff()});
  }
  // and the dummy expansion against plain normal equations
  MatrixXd full(12, 6);
  for (int i = 0; i < 12; ++i) {
    full(i, 0) = x(i, 0);
    full(i, 1) = x(i, 1);
    for (int g = 0; g < 4; ++g) full(i, 2 + g) = firm[static_cast<std::size_t>(i)] == "f" + std::to_string(g + 1);
  }
  const auto w = fe_regression(y, x, {"x", "z"}, {firm}, SeOptions::classic(), FeMethod::within);
  fe_gap = std::max(fe_gap, (w.coef - oracle::normal_equations(full, y).head(2)).cwiseAbs().maxCoeff());
  c.note("within/dummy gap " + num(fe_gap, 3));
  c.expect(fe_gap <= 1e-10, "within vs dummies");
  return c.result();
}

// ---- 6: noise-free recovery ----

Outcome recovery() {
  Checker c;
  ScenarioSpec spec;
  spec.n_assets = 20;
  spec.n_markets = 5;
  spec.n_quarters = 8;
  spec.loading_min = 0.1;
  spec.loading_max = 0.3;
  spec.seed = 606;
  const Scenario sc = generate(spec);
  RadarConfig cfg;
  cfg.algorithms = {Algorithm::lasso};
  cfg.hyperparameters[Algorithm::lasso] = LassoParams{1e-8};
  cfg.compute_importance = false;
  cfg.keep_models = true;
  cfg.threads = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const RadarResult r = run_radar(data_of(sc), cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  double min_r2 = 1.0;
  for (const auto& rec : stock_quarter_r2(r.forecasts, sc.assets)) {
    if (sc.truth.exposed.at(rec.asset)) min_r2 = std::min(min_r2, rec.r2);
  }
  const SignalTable table(sc.markets, sc.calendar.dates(), spec.lags);
  const auto& cols = table.columns();
  double worst = 0.0;
  std::size_t models = 0;
  for (const auto& o : r.outcomes) {
    if (!o.model || !sc.truth.exposed.at(o.task.asset)) continue;
    const LinearModel& m = *o.model->linear();
    const StandardizationStats& st = *o.model->standardization;
    const auto& truth = sc.truth.loadings.at(o.task.asset);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double raw = st.sd(jj) > 0.0 ? m.coef(jj) / st.sd(jj) : 0.0;
      auto it = truth.find(cols[j]);
      worst = std::max(worst, std::abs(raw - (it == truth.end() ? 0.0 : it->second)));
    }
    ++models;
  }
  c.note("min R2 " + num(min_r2, 6) + ", max loading gap " + num(worst, 3) + " over " + std::to_string(models) +
         " models, " + num(secs, 3) + " s");
  c.expect(models == 20u * 4u, "model count");
  c.expect(min_r2 > 0.99, "R2");
  c.expect(worst <= 1e-3, "loadings");
  c.expect(secs < 120.0, "runtime");
  return c.result();
}

// ---- 7: importance decays with the lag ----

Outcome decay() {
  Checker c;
  ScenarioSpec spec;
  spec.n_assets = 12;
  spec.n_markets = 5;
  spec.n_quarters = 7;
  spec.loading_min = 0.2;
  spec.loading_max = 0.4;
  spec.profile = decay_profile(DecayKind::geometric, 4, 0.5);
  spec.noise_sd = 0.002;
  spec.seed = 707;
  const Scenario sc = generate(spec);
  RadarConfig cfg;
  cfg.algorithms = {Algorithm::lasso, Algorithm::gradient_boosting};
  cfg.hyperparameters[Algorithm::lasso] = LassoParams{1e-5};
  cfg.hyperparameters[Algorithm::gradient_boosting] = BoostingParams{100, 3, 5, 0.1, 0.8, 0.5};
  cfg.importance.background_cap = 100;
  const RadarResult r = run_radar(data_of(sc), cfg);
  const auto r2 = stock_quarter_r2(r.forecasts, sc.assets);

  for (Algorithm a : cfg.algorithms) {
    std::vector<double> sum(4, 0.0), n(4, 0.0);
    for (const auto& rec : r.importance) {
      if (rec.algorithm != a) continue;
      sum[static_cast<std::size_t>(rec.signal.lag_week - 1)] += rec.importance;
      n[static_cast<std::size_t>(rec.signal.lag_week - 1)] += 1.0;
    }
    std::string means;
    bool decreasing = true;
    for (std::size_t k = 0; k < 4; ++k) {
      sum[k] /= std::max(n[k], 1.0);
      means += (k ? "," : "") + num(sum[k] * 1e4, 3);
      if (k > 0 && !(sum[k] < sum[k - 1])) decreasing = false;
    }
    ImportanceRegressionOptions o;
    o.form = DecayForm::exponential;
    o.positive_filter = &r2;
    const RegressionResult reg = importance_decay_regression(r.importance, a, o);
    const std::string tag(to_string(a));
    c.note(tag + " means x1e4 [" + means + "] slope t " + num(reg.t(1), 3));
    c.expect(decreasing, tag + " monotone");
    c.expect(reg.coef(1) < 0.0 && reg.t(1) < -2.0, tag + " slope");
  }
  return c.result();
}

// ---- 8: long-short signal and a shuffled control ----

RadarConfig reduced_config() {
  RadarConfig cfg;
  cfg.hyperparameters[Algorithm::lasso] = LassoParams{1e-4};
  cfg.hyperparameters[Algorithm::random_forest] = ForestParams{30, 4, 5, 0.8, 0.5};
  cfg.hyperparameters[Algorithm::gradient_boosting] = BoostingParams{50, 3, 5, 0.1, 0.8, 0.5};
  NetParams np;
  np.epochs = 10;
  cfg.hyperparameters[Algorithm::neural_net] = np;
  return cfg;
}

double combined_t(const std::vector<Forecast>& forecasts, const PortfolioInputs& in) {
  const auto ls = long_short_portfolios(forecasts, 0.05, in);
  return performance_stats(combined_portfolio(ls, in).series).t_stat;
}

Outcome portfolio_signal() {
  Checker c;
  ScenarioSpec spec;
  spec.n_assets = 100;
  spec.n_markets = 5;
  spec.n_quarters = 10;
  spec.exposed_fraction = 0.3;
  spec.loading_min = 0.1;
  spec.loading_max = 0.3;
  spec.noise_sd = 0.02;
  spec.seed = 808;
  const Scenario sc = generate(spec);
  RadarConfig cfg = reduced_config();
  cfg.compute_importance = false;
  const RadarResult r = run_radar(data_of(sc), cfg);

  std::set<Quarter> oos;
  for (const auto& f : r.forecasts) oos.insert(Quarter::of(f.date));
  const PortfolioInputs in{&sc.assets, Weighting::equal, nullptr, &sc.calendar};
  const auto ls = long_short_portfolios(r.forecasts, 0.05, in);
  const PerformanceStats st = performance_stats(combined_portfolio(ls, in).series);
  c.expect(oos.size() == 6, "out-of-sample quarters " + std::to_string(oos.size()));
  c.expect(ls.size() == 4, "algorithm portfolios");
  c.expect(st.mean_excess > 0.0 && st.t_stat > 2.0, "combined t");

  // same permutation of asset labels for every algorithm on a date
  std::map<Date, std::vector<std::size_t>> by_date;
  for (std::size_t i = 0; i < r.forecasts.size(); ++i) by_date[r.forecasts[i].date].push_back(i);
  Rng rng(8080);
  int quiet = 0;
  for (int s = 0; s < 50; ++s) {
    std::vector<Forecast> shuffled = r.forecasts;
    for (const auto& [d, idx] : by_date) {
      std::vector<std::string> assets;
      for (std::size_t i : idx) assets.push_back(r.forecasts[i].asset);
      std::sort(assets.begin(), assets.end());
      assets.erase(std::unique(assets.begin(), assets.end()), assets.end());
      std::vector<std::string> perm = assets;
      rng.shuffle(perm);
      std::map<std::string, std::string> relabel;
      for (std::size_t k = 0; k < assets.size(); ++k) relabel[assets[k]] = perm[k];
      for (std::size_t i : idx) shuffled[i].asset = relabel.at(r.forecasts[i].asset);
    }
    if (std::abs(combined_t(shuffled, in)) < 2.0) ++quiet;
  }
  c.note("combined mean " + num(st.mean_excess * 1e4, 3) + "bp t " + num(st.t_stat, 3) + ", control quiet in " +
         std::to_string(quiet) + "/50");
  c.expect(quiet >= 45, "shuffled control");
  return c.result();
}

// ---- 9: nonlinearity ----

Outcome nonlinearity() {
  Checker c;
  ScenarioSpec spec;
  spec.n_assets = 10;
  spec.n_markets = 2;
  spec.n_quarters = 6;
  spec.lags = 1;
  spec.profile = {1.0};
  spec.loading_min = spec.loading_max = 0.0;
  spec.interaction = 20.0;
  spec.noise_sd = 0.001;
  spec.seed = 909;
  const Scenario sc = generate(spec);
  RadarConfig cfg;
  cfg.algorithms = {Algorithm::lasso, Algorithm::gradient_boosting};
  cfg.lags = 1;
  cfg.hyperparameters[Algorithm::lasso] = LassoParams{1e-5};
  cfg.hyperparameters[Algorithm::gradient_boosting] = BoostingParams{300, 3, 5, 0.1, 0.8, 1.0};
  cfg.compute_importance = false;
  const RadarResult r = run_radar(data_of(sc), cfg);
  std::map<Algorithm, std::pair<double, int>> acc;
  for (const auto& rec : stock_quarter_r2(r.forecasts, sc.assets)) {
    acc[rec.algorithm].first += rec.r2;
    acc[rec.algorithm].second += 1;
  }
  const double gb = acc[Algorithm::gradient_boosting].first / std::max(1, acc[Algorithm::gradient_boosting].second);
  const double la = acc[Algorithm::lasso].first / std::max(1, acc[Algorithm::lasso].second);
  c.note("mean R2 GB " + num(gb, 4) + " LASSO " + num(la, 4));
  c.expect(gb - la >= 0.05, "GB advantage");
  return c.result();
}

// ---- 10: thread count does not change output ----

Outcome determinism() {
  Checker c;
  const fs::path dir = fs::temp_directory_path() / "sigradar_acceptance_threads";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    ScenarioSpec spec;
    spec.n_assets = 6;
    spec.n_markets = 3;
    spec.n_quarters = 6;
    spec.days_per_quarter = 40;
    spec.loading_max = 0.3;
    spec.noise_sd = 0.003;
    spec.seed = seed;
    const Scenario sc = generate(spec);
    RadarConfig cfg = reduced_config();
    cfg.min_train_rows = 30;
    cfg.seed = seed;
    cfg.importance.permutations = 4;
    cfg.importance.sampled_background_cap = 16;
    std::vector<std::string> files;
    for (unsigned threads : {1u, 8u}) {
      cfg.threads = threads;
      const RadarResult r = run_radar(data_of(sc), cfg);
      const std::string stem = std::to_string(seed) + "_" + std::to_string(threads);
      io::write_forecasts(dir / (stem + "_f.csv"), r.forecasts);
      io::write_importance(dir / (stem + "_i.csv"), r.importance);
      files.push_back(slurp(dir / (stem + "_f.csv")));
      files.push_back(slurp(dir / (stem + "_i.csv")));
    }
    c.expect(!files[0].empty() && files[0] == files[2], "forecasts seed " + std::to_string(seed));
    c.expect(!files[1].empty() && files[1] == files[3], "importance seed " + std::to_string(seed));
  }
  c.note("3 seeds, 1 vs 8 threads");
  return c.result();
}

// ---- 11: formula identities ----

Outcome identities() {
  Checker c;
  c.expect(std::abs(r2_oos((VectorXd(2) << 0.01, -0.02).finished(), (VectorXd(2) << 0.0, -0.01).finished()) - 0.6) < 1e-12,
           "r2_oos");
  const DailyWeights prev{parse_date("2020-01-02"), {{"A", 0.5}, {"B", 0.5}}};
  const DailyWeights today{parse_date("2020-01-03"), {{"A", 0.5}, {"B", 0.5}}};
  const double t = turnover(prev, {{"A", 0.10}, {"B", 0.0}}, today);
  c.expect(std::abs(t - 0.0238) < 5e-5, "turnover " + num(t));
  c.expect(turnover(prev, {{"A", 0.0}, {"B", 0.0}}, {today.date, {{"C", 0.5}, {"D", 0.5}}}) == 1.0, "full swap");
  c.expect(timing_exposure({0.1, 0.2, 0.1, 0.3}, 2.0) == 2.0, "exposure up");
  c.expect(timing_exposure({-0.1, -0.2, -0.1, -0.3}, 2.0) == -1.0, "exposure down");
  c.expect(timing_exposure({0.1, -0.2, 0.1, 0.3}, 2.0) == 1.0, "exposure mixed");
  PortfolioSeries two;
  two.dates = {parse_date("2020-01-02"), parse_date("2020-01-03")};
  two.returns = {0.01, 0.01};
  c.expect(std::abs(to_monthly(two).returns.at(0) - 0.0201) < 1e-14, "monthly");
  c.expect(lasso_sparsity({(VectorXd(4) << 0, 0.5, 0, -0.1).finished()}) == 0.5, "sparsity 0.5");
  c.expect(lasso_sparsity({(VectorXd(2) << 0.5, 0.0).finished(), VectorXd::Zero(2)}) == 0.25, "sparsity 0.25");
  c.note("r2, turnover, exposure, monthly, sparsity");
  return c.result();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"trading-cost arithmetic", costs},
      {"dissemination windows", windows},
      {"lasso soft-threshold oracle and KKT", lasso},
      {"shapley exactness and properties", shapley},
      {"robust, clustered and fixed-effects oracles", econometrics},
      {"noise-free recovery", recovery},
      {"importance decay", decay},
      {"long-short signal vs shuffled control", portfolio_signal},
      {"nonlinearity", nonlinearity},
      {"thread-count determinism", determinism},
      {"formula identities", identities}};

  // optional: run a single criterion by number
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %-44s %s  (%.1fs) %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
