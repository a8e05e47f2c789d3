#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sigradar/econometrics.hpp"
#include "sigradar/error.hpp"

using namespace sigradar;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Date d(const char* s) { return parse_date(s); }

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MatrixXd with_const(const MatrixXd& x) {
  MatrixXd out(x.rows(), x.cols() + 1);
  out << VectorXd::Ones(x.rows()), x;
  return out;
}

}  // namespace

TEST_CASE("out-of-sample r2") {
  CHECK(r2_oos(vec({0.01, -0.02}), vec({0.01, -0.02})) == 1.0);
  CHECK(r2_oos(vec({0.01, -0.02}), vec({0.0, 0.0})) == 0.0);
  CHECK(r2_oos(vec({0.01, -0.02}), vec({0.0, -0.01})) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r2_oos(vec({0.01, 0.02}), vec({-0.05, 0.07})) < 0.0);
  CHECK_THROWS_WITH_AS(r2_oos(vec({0.0, 0.0}), vec({0.1, 0.0})), "undefined denominator", ValidationError);
  CHECK_THROWS_AS(r2_oos(vec({0.1}), vec({0.1, 0.0})), ValidationError);
}

TEST_CASE("r2 summary") {
  const Quarter q = Quarter::parse("2015Q1");
  const std::vector<R2Record> single{{"s1", q, Algorithm::lasso, 0.02}, {"s2", q, Algorithm::lasso, -0.01}};
  const R2Summary s = summarize_r2(single);
  CHECK(s.by_algorithm.at(Algorithm::lasso).fraction_positive == 0.5);
  CHECK(s.by_algorithm.at(Algorithm::lasso).mean_positive == 0.02);

  const std::vector<R2Record> two{{"s1", q, Algorithm::lasso, 0.02},
                                  {"s2", q, Algorithm::lasso, -0.01},
                                  {"s3", q, Algorithm::lasso, -0.03},
                                  {"s1", q, Algorithm::gradient_boosting, -0.02},
                                  {"s2", q, Algorithm::gradient_boosting, 0.04},
                                  {"s3", q, Algorithm::gradient_boosting, -0.01}};
  const R2Summary u = summarize_r2(two);
  CHECK(u.stock_quarters == 3);
  CHECK(u.union_fraction == doctest::Approx(2.0 / 3.0));
  for (const auto& [algo, a] : u.by_algorithm) {
    CHECK(u.union_fraction >= a.fraction_positive);
    for (std::size_t i = 1; i < a.percentiles.size(); ++i) CHECK(a.percentiles[i] <= a.percentiles[i - 1]);
  }
  CHECK(percentile({1, 2, 3, 4}, 50) == doctest::Approx(2.5));
  CHECK(percentile({5, 1, 3}, 100) == 5.0);
}

TEST_CASE("stock-quarter r2 from forecasts") {
  ReturnPanel realized;
  realized.add(d("2015-01-05"), "A", 0.01);
  realized.add(d("2015-01-06"), "A", -0.02);
  realized.add(d("2015-04-01"), "A", 0.03);
  const std::vector<Forecast> fc{{d("2015-01-05"), "A", Algorithm::lasso, 0.0},
                                 {d("2015-01-06"), "A", Algorithm::lasso, -0.01},
                                 {d("2015-04-01"), "A", Algorithm::lasso, 0.03}};
  const auto recs = stock_quarter_r2(fc, realized);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].quarter == Quarter::parse("2015Q1"));
  CHECK(recs[0].r2 == doctest::Approx(0.6));
  CHECK(recs[1].r2 == 1.0);
}

TEST_CASE("ols standard errors against hand sandwiches") {
  MatrixXd x(6, 1);
  x << 1.0, 2.0, 3.5, 4.0, 6.0, 7.5;
  const VectorXd y = vec({1.2, 1.9, 3.9, 3.7, 6.8, 7.1});
  const MatrixXd xc = with_const(x);

  const auto hc1 = ols(y, xc, {"const", "x"}, SeOptions::hc1());
  const VectorXd want = oracle::hc1_se(xc, y);
  CHECK((hc1.se - want).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((hc1.coef - oracle::normal_equations(xc, y)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(hc1.t(1) == doctest::Approx(hc1.coef(1) / hc1.se(1)));

  MatrixXd x2(9, 2);
  x2 << 0.3, 1, 1.1, 0, 2.2, 1, 2.9, 1, 4.1, 0, 5.3, 0, 5.8, 1, 7.2, 0, 8.1, 1;
  const VectorXd y2 = vec({0.5, 1.9, 2.1, 3.3, 4.5, 4.7, 6.6, 7.0, 7.9});
  const std::vector<std::string> g{"a", "a", "b", "b", "b", "c", "c", "d", "d"};
  const auto cr1 = ols(y2, with_const(x2), {"const", "x", "z"}, SeOptions::cluster(g));
  CHECK((cr1.se - oracle::cr1_se(with_const(x2), y2, g)).cwiseAbs().maxCoeff() < 1e-10);

  // every row its own cluster: the CR1 and HC1 scale factors coincide
  std::vector<std::string> own;
  for (int i = 0; i < 9; ++i) own.push_back(std::to_string(i));
  const auto singles = ols(y2, with_const(x2), {"const", "x", "z"}, SeOptions::cluster(own));
  const auto robust = ols(y2, with_const(x2), {"const", "x", "z"}, SeOptions::hc1());
  CHECK((singles.se - robust.se).cwiseAbs().maxCoeff() < 1e-12);

  // classic: residuals orthogonal to the regressors
  const auto classic = ols(y2, with_const(x2), {"const", "x", "z"});
  CHECK((with_const(x2).transpose() * classic.residuals).cwiseAbs().maxCoeff() < 1e-8);
  const double s2 = classic.residuals.squaredNorm() / (9 - 3);
  const MatrixXd xtx = with_const(x2).transpose() * with_const(x2);
  CHECK(classic.se(1) == doctest::Approx(std::sqrt(s2 * xtx.inverse()(1, 1))).epsilon(1e-10));
  CHECK(classic.r2 <= 1.0);

  const auto exact = ols(2.0 * x.col(0), x, {"x"});
  CHECK(exact.se(0) < 1e-12);
  CHECK(exact.r2 == doctest::Approx(1.0));

  MatrixXd sing(6, 2);
  sing << x, 2.0 * x;
  CHECK_THROWS_AS(ols(y, sing, {"a", "b"}), ValidationError);
  CHECK_THROWS_AS(ols(y, xc, {"c", "x"}, SeOptions::cluster(std::vector<std::string>(6, "one"))), ValidationError);
}

TEST_CASE("factor alpha") {
  FactorSeries f;
  f.names = {"MKT", "SMB"};
  PortfolioSeries p, q, planted;
  std::map<Date, double> rf;
  Rng rng(3);
  Date t = d("2019-01-01");
  for (int i = 0; i < 40; ++i, t += Days{1}) {
    const double mkt = 0.01 * rng.normal(), smb = 0.01 * rng.normal();
    f.rows[t] = {mkt, smb};
    rf[t] = 0.0001;
    p.dates.push_back(t);
    p.returns.push_back(0.0001 + mkt);
    q.dates.push_back(t);
    q.returns.push_back(0.0001 + mkt + 0.0002);
    planted.dates.push_back(t);
    planted.returns.push_back(0.0001 + 0.0003 + 0.7 * mkt - 0.4 * smb);
  }
  const auto a = factor_alpha(p, rf, f);
  CHECK(std::abs(a.coef_of("alpha")) < 1e-14);
  CHECK(a.coef_of("MKT") == doctest::Approx(1.0));
  CHECK(a.r2 == doctest::Approx(1.0));
  CHECK(a.se_type == SeType::robust_hc1);
  CHECK(factor_alpha(q, rf, f).coef_of("alpha") == doctest::Approx(0.0002).epsilon(1e-10));
  const auto pl = factor_alpha(planted, rf, f);
  CHECK(std::abs(pl.coef_of("alpha") - 0.0003) < 1e-8);
  CHECK(std::abs(pl.coef_of("MKT") - 0.7) < 1e-8);
  CHECK(std::abs(pl.coef_of("SMB") + 0.4) < 1e-8);

  // linearity in y: alpha of the average equals the average alpha
  const PortfolioSeries avg = combine({p, planted});
  CHECK(factor_alpha(avg, rf, f).coef_of("alpha") ==
        doctest::Approx(0.5 * (a.coef_of("alpha") + pl.coef_of("alpha"))).epsilon(1e-10));

  f.rows.erase(p.dates[3]);
  const std::string gap = format_date(p.dates[3]);
  CHECK_THROWS_WITH_AS(factor_alpha(p, rf, f), doctest::Contains(gap.c_str()), ValidationError);
}

TEST_CASE("fixed effects") {
  const std::vector<std::string> firm{"f1", "f1", "f1", "f2", "f2", "f2", "f3", "f3", "f3", "f4", "f4", "f4"};
  const std::vector<std::string> year{"y1", "y2", "y3", "y1", "y2", "y3", "y1", "y2", "y3", "y1", "y2", "y3"};
  MatrixXd x(12, 1);
  x << 0.2, 1.3, 2.1, 0.7, 1.1, 3.2, 0.1, 2.5, 2.2, 1.9, 0.4, 2.8;
  const VectorXd y = vec({1.0, 2.1, 3.3, 2.2, 2.4, 4.9, 0.7, 3.1, 3.3, 4.0, 2.5, 5.2});

  for (const SeOptions& se : {SeOptions::classic(), SeOptions::hc1(), SeOptions::cluster(year)}) {
    const auto within = fe_regression(y, x, {"x"}, {firm}, se, FeMethod::within);
    const auto dummy = fe_regression(y, x, {"x"}, {firm}, se, FeMethod::dummies);
    CHECK(std::abs(within.coef(0) - dummy.coef(0)) < 1e-10);
    CHECK(std::abs(within.se(0) - dummy.se(0)) < 1e-10);
    CHECK(std::abs(within.r2 - dummy.r2) < 1e-10);
  }

  // single FE and no regressors: R2 is the between-group share of variance
  const auto anova = fe_regression(y, MatrixXd(12, 0), {}, {firm});
  const double mean = y.mean();
  double between = 0.0, total = 0.0;
  for (int g = 0; g < 4; ++g) {
    const double gm = y.segment(3 * g, 3).mean();
    between += 3.0 * (gm - mean) * (gm - mean);
  }
  for (int i = 0; i < 12; ++i) total += (y(i) - mean) * (y(i) - mean);
  CHECK(anova.r2 == doctest::Approx(between / total).epsilon(1e-12));

  VectorXd stepwise(12);
  for (int i = 0; i < 12; ++i) stepwise(i) = 1.0 + i / 3;
  CHECK(fe_regression(stepwise, MatrixXd(12, 0), {}, {firm}).r2 == doctest::Approx(1.0));

  // two-way: dummy expansion against a hand design
  const auto two = fe_regression(y, x, {"x"}, {firm, year});
  MatrixXd full(12, 7);
  for (int i = 0; i < 12; ++i) {
    full(i, 0) = x(i, 0);
    for (int g = 0; g < 4; ++g) full(i, 1 + g) = firm[static_cast<std::size_t>(i)] == "f" + std::to_string(g + 1);
    full(i, 5) = year[static_cast<std::size_t>(i)] == "y2";
    full(i, 6) = year[static_cast<std::size_t>(i)] == "y3";
  }
  CHECK(std::abs(two.coef(0) - oracle::normal_equations(full, y)(0)) < 1e-10);

  MatrixXd collinear(12, 1);
  for (int i = 0; i < 12; ++i) collinear(i, 0) = i / 3;
  CHECK_THROWS_AS(fe_regression(y, collinear, {"c"}, {firm}), ValidationError);
}

TEST_CASE("dissemination windows") {
  CHECK(dissemination_window(0.2065, -0.0021, DecayForm::exponential) == 4);
  CHECK(dissemination_window(3.6224, -0.0007, DecayForm::exponential) == 8);
  CHECK(std::abs(dissemination_window(1.0663, -0.0550, DecayForm::linear) - 19) <= 1);
  CHECK(dissemination_window(1.0, -2.0, DecayForm::linear) == 0);
  CHECK(dissemination_window(3.0, -1.0, DecayForm::linear) == 2);  // 3 - 3 = 0 is not positive
  CHECK_THROWS_WITH_AS(dissemination_window(1.0, 0.0, DecayForm::linear), "no decay", ValidationError);

  int last = 1 << 30;
  for (double slope = -0.0001; slope > -1.0; slope *= 1.7) {
    const int w = dissemination_window(0.5, slope, DecayForm::exponential);
    CHECK(w <= last);
    last = w;
  }
}

TEST_CASE("sparsity and monthly aggregation") {
  CHECK(lasso_sparsity({VectorXd::Zero(4)}) == 0.0);
  CHECK(lasso_sparsity({vec({0, 0.5, 0, -0.1})}) == 0.5);
  CHECK(lasso_sparsity({vec({0.5, 0.5}), vec({0.0, 0.0})}) == 0.5);
  CHECK(lasso_sparsity({vec({0.5, 0.0}), vec({0.0, 0.0})}) == 0.25);

  PortfolioSeries s;
  s.dates = {d("2020-01-02"), d("2020-01-03"), d("2020-03-02")};
  s.returns = {0.01, 0.01, 0.0};
  const auto m = to_monthly(s);
  REQUIRE(m.months.size() == 2);
  CHECK(m.returns[0] == doctest::Approx(0.0201).epsilon(1e-14));
  CHECK(m.returns[1] == 0.0);
  CHECK(m.months[1] == std::chrono::year{2020} / std::chrono::March);

  PortfolioSeries zeros;
  for (Date t = d("2020-05-01"); zeros.size() < 21; t += Days{1}) {
    zeros.dates.push_back(t);
    zeros.returns.push_back(0.0);
  }
  CHECK(to_monthly(zeros).returns == std::vector<double>{0.0});
}

TEST_CASE("importance decay regression") {
  std::vector<ImportanceRecord> recs;
  const Quarter q = Quarter::parse("2016Q2");
  Rng rng(1);
  for (const std::string a : {"A1", "A2", "A3"}) {
    for (const std::string src : {"M1", "M2"}) {
      for (int k = 1; k <= 4; ++k) recs.push_back({a, q, Algorithm::lasso, {src, k}, 1e-4 * (2.0 - 0.02 * std::exp(k) + 0.1 * rng.normal())});
    }
  }
  const auto r = importance_decay_regression(recs, Algorithm::lasso);
  VectorXd y(24);
  MatrixXd x(24, 2);
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = recs[i].importance * 1e4;
    x(static_cast<Eigen::Index>(i), 0) = 1.0;
    x(static_cast<Eigen::Index>(i), 1) = std::exp(recs[i].signal.lag_week);
    keys.push_back(recs[i].asset + "|" + q.str() + "|" + recs[i].signal.source);
  }
  CHECK((r.coef - oracle::normal_equations(x, y)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((r.se - oracle::cr1_se(x, y, keys)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(r.names[1] == "exp_lagged_week");
  CHECK(r.coef_of("exp_lagged_week") < 0.0);

  // the positive-R2 filter drops stock-quarters that did not forecast well;
  // importance is keyed by the training quarter, R2 by the quarter forecast
  const std::vector<R2Record> r2{{"A1", q + 1, Algorithm::lasso, 0.1}, {"A2", q + 1, Algorithm::lasso, -0.1},
                                 {"A3", q + 1, Algorithm::lasso, 0.2}};
  ImportanceRegressionOptions opt;
  opt.positive_filter = &r2;
  CHECK(importance_decay_regression(recs, Algorithm::lasso, opt).n == 16);
}

TEST_CASE("table formatting") {
  CHECK(stars(2.6) == "***");
  CHECK(stars(-2.0) == "**");
  CHECK(stars(1.7) == "*");
  CHECK(stars(1.0).empty());
  RegressionResult r;
  r.names = {"const", "x"};
  r.coef = vec({0.2065, -0.0021});
  r.t = vec({63.71, -24.84});
  r.se = r.coef.cwiseQuotient(r.t);
  r.n = 873448;
  r.adj_r2 = 0.0005;
  const std::string text = format_regression_table({"(1) LASSO"}, {r});
  CHECK(text.find("0.2065***") != std::string::npos);
  CHECK(text.find("(-24.84)") != std::string::npos);
  CHECK(text.find("873448") != std::string::npos);
}
