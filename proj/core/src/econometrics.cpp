#include "sigradar/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include "sigradar/error.hpp"

namespace sigradar {

double r2_oos(const Eigen::VectorXd& realized, const Eigen::VectorXd& predicted) {
  if (realized.size() == 0) throw ValidationError("r2_oos needs at least one observation");
  if (realized.size() != predicted.size()) throw ValidationError("r2_oos: length mismatch");
  const double den = realized.squaredNorm();
  if (!(den > 0.0)) throw ValidationError("undefined denominator");
  return 1.0 - (realized - predicted).squaredNorm() / den;
}

std::vector<R2Record> stock_quarter_r2(const std::vector<Forecast>& forecasts, const ReturnPanel& realized) {
  using Key = std::tuple<std::string, Quarter, Algorithm>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& f : forecasts) {
    const auto r = realized.ret_on(f.asset, f.date);
    if (!r) continue;
    auto& g = groups[{f.asset, Quarter::of(f.date), f.algorithm}];
    g.first.push_back(*r);
    g.second.push_back(f.yhat);
  }
  std::vector<R2Record> out;
  for (const auto& [key, g] : groups) {
    const Eigen::Map<const Eigen::VectorXd> r(g.first.data(), static_cast<Eigen::Index>(g.first.size()));
    const Eigen::Map<const Eigen::VectorXd> p(g.second.data(), static_cast<Eigen::Index>(g.second.size()));
    if (!(r.squaredNorm() > 0.0)) continue;
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), r2_oos(r, p)});
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty set");
  if (!(q >= 0.0 && q <= 100.0)) throw ValidationError("percentile must be in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

R2Summary summarize_r2(const std::vector<R2Record>& records) {
  if (records.empty()) throw ValidationError("no R2 values to summarize");
  R2Summary out;
  std::map<Algorithm, std::vector<double>> by_algo;
  std::map<std::pair<std::string, Quarter>, bool> any_positive;
  for (const auto& r : records) {
    by_algo[r.algorithm].push_back(r.r2);
    auto& flag = any_positive[{r.asset, r.quarter}];
    flag = flag || r.r2 > 0.0;
  }
  for (const auto& [algo, vals] : by_algo) {
    R2AlgoSummary s;
    s.count = vals.size();
    double pos_sum = 0.0;
    std::size_t pos_n = 0;
    for (double v : vals) {
      if (v > 0.0) {
        pos_sum += v;
        ++pos_n;
      }
    }
    s.fraction_positive = static_cast<double>(pos_n) / static_cast<double>(vals.size());
    s.mean_positive = pos_n == 0 ? 0.0 : pos_sum / static_cast<double>(pos_n);
    for (double q : kR2Percentiles) s.percentiles.push_back(percentile(vals, q));
    out.by_algorithm[algo] = std::move(s);
  }
  out.stock_quarters = any_positive.size();
  const auto hits = std::count_if(any_positive.begin(), any_positive.end(), [](const auto& kv) { return kv.second; });
  out.union_fraction = static_cast<double>(hits) / static_cast<double>(any_positive.size());
  return out;
}

std::string to_string(SeType t) {
  switch (t) {
    case SeType::classic: return "classic";
    case SeType::robust_hc1: return "hc1";
    case SeType::clustered: return "clustered";
  }
  return "?";
}

double RegressionResult::coef_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ValidationError("no coefficient named " + name);
  return coef(it - names.begin());
}

double RegressionResult::t_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ValidationError("no coefficient named " + name);
  return t(it - names.begin());
}

namespace {

// Least squares with `absorbed` extra parameters already projected out of y and x.
// sst is the total sum of squares the R2 is measured against.
RegressionResult least_squares(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                               std::vector<std::string> names, const SeOptions& se, std::size_t absorbed,
                               double sst, const char* singular_message) {
  const auto n = static_cast<std::size_t>(y.size());
  const auto p = static_cast<std::size_t>(x.cols());
  if (static_cast<std::size_t>(x.rows()) != n) throw ValidationError("design rows do not match y");
  if (names.size() != p) throw ValidationError("one name per regressor required");
  if (n <= p + absorbed) throw ValidationError("regression needs more rows than parameters");

  RegressionResult out;
  out.names = std::move(names);
  out.n = n;
  out.se_type = se.type;
  const double df = static_cast<double>(n - p - absorbed);

  Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  if (p > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (static_cast<std::size_t>(qr.rank()) < p) throw ValidationError(singular_message);
    out.coef = qr.solve(y);
    const Eigen::MatrixXd xtx = x.transpose() * x;
    bread = xtx.ldlt().solve(Eigen::MatrixXd::Identity(xtx.rows(), xtx.cols()));
    out.residuals = y - x * out.coef;
  } else {
    out.coef.resize(0);
    out.residuals = y;
  }

  Eigen::MatrixXd v;
  switch (se.type) {
    case SeType::classic:
      v = out.residuals.squaredNorm() / df * bread;
      break;
    case SeType::robust_hc1: {
      const Eigen::MatrixXd xe = x.array().colwise() * out.residuals.array();
      v = static_cast<double>(n) / df * bread * (xe.transpose() * xe) * bread;
      break;
    }
    case SeType::clustered: {
      if (se.clusters.size() != n) throw ValidationError("one cluster key per row required");
      std::map<std::string, Eigen::VectorXd> scores;
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        auto [it, fresh] = scores.try_emplace(se.clusters[i], Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p)));
        it->second += x.row(r).transpose() * out.residuals(r);
      }
      const double g = static_cast<double>(scores.size());
      if (scores.size() < 2) throw ValidationError("clustered standard errors need at least 2 clusters");
      Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
      for (const auto& [key, u] : scores) meat += u * u.transpose();
      v = g / (g - 1.0) * (static_cast<double>(n) - 1.0) / df * bread * meat * bread;
      break;
    }
  }
  out.se = v.diagonal().cwiseMax(0.0).cwiseSqrt();
  out.t = out.coef.cwiseQuotient(out.se);

  const double ssr = out.residuals.squaredNorm();
  if (sst > 0.0) {
    out.r2 = 1.0 - ssr / sst;
  } else {
    out.r2 = ssr <= 1e-24 ? 1.0 : 0.0;
  }
  out.adj_r2 = 1.0 - (1.0 - out.r2) * (static_cast<double>(n) - 1.0) / df;
  return out;
}

double centered_sst(const Eigen::VectorXd& y) {
  return (y.array() - y.mean()).matrix().squaredNorm();
}

}  // namespace

RegressionResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, std::vector<std::string> names,
                     const SeOptions& se, bool centered_r2) {
  if (y.size() == 0) throw ValidationError("regression on no rows");
  const double sst = centered_r2 ? centered_sst(y) : y.squaredNorm();
  return least_squares(y, x, std::move(names), se, 0, sst, "singular design matrix");
}

RegressionResult factor_alpha(const PortfolioSeries& series, const std::map<Date, double>& rf,
                              const FactorSeries& factors) {
  const std::size_t n = series.size();
  const auto k = static_cast<Eigen::Index>(factors.names.size());
  std::vector<std::string> missing;
  for (const auto& d : series.dates) {
    if (factors.rows.count(d) == 0 || (!rf.empty() && rf.count(d) == 0)) missing.push_back(format_date(d));
  }
  if (!missing.empty()) {
    std::string msg = "factor or risk-free data missing on " + std::to_string(missing.size()) + " dates:";
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 10); ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    throw ValidationError(msg);
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Date d = series.dates[i];
    y(r) = series.returns[i] - (rf.empty() ? 0.0 : rf.at(d));
    const auto& f = factors.rows.at(d);
    if (static_cast<Eigen::Index>(f.size()) != k) throw ValidationError("factor row width mismatch on " + format_date(d));
    x(r, 0) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) x(r, j + 1) = f[static_cast<std::size_t>(j)];
  }
  std::vector<std::string> names{"alpha"};
  names.insert(names.end(), factors.names.begin(), factors.names.end());
  return ols(y, x, std::move(names), SeOptions::hc1());
}

RegressionResult fe_regression(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                               std::vector<std::string> names,
                               const std::vector<std::vector<std::string>>& fixed_effects, const SeOptions& se,
                               FeMethod method) {
  const auto n = static_cast<std::size_t>(y.size());
  if (n == 0) throw ValidationError("regression on no rows");
  if (fixed_effects.empty()) throw ValidationError("fe_regression needs at least one fixed effect");
  for (const auto& keys : fixed_effects) {
    if (keys.size() != n) throw ValidationError("one fixed-effect key per row required");
  }
  if (method == FeMethod::automatic) method = fixed_effects.size() == 1 ? FeMethod::within : FeMethod::dummies;
  if (method == FeMethod::within && fixed_effects.size() != 1) {
    throw ValidationError("within-demeaning handles a single fixed effect");
  }
  const double sst = centered_sst(y);

  if (method == FeMethod::within) {
    const auto& keys = fixed_effects.front();
    std::map<std::string, std::vector<Eigen::Index>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[keys[i]].push_back(static_cast<Eigen::Index>(i));
    Eigen::VectorXd yd = y;
    Eigen::MatrixXd xd = x;
    for (const auto& [key, rows] : groups) {
      const double m = static_cast<double>(rows.size());
      double ym = 0.0;
      Eigen::RowVectorXd xm = Eigen::RowVectorXd::Zero(x.cols());
      for (auto r : rows) {
        ym += y(r);
        xm += x.row(r);
      }
      ym /= m;
      xm /= m;
      for (auto r : rows) {
        yd(r) -= ym;
        xd.row(r) -= xm;
      }
    }
    return least_squares(yd, xd, std::move(names), se, groups.size(), sst, "regressors collinear with fixed effects");
  }

  // dummy expansion: all levels of the first effect, drop the first level of the rest
  std::vector<Eigen::VectorXd> dummies;
  std::vector<std::string> dummy_names;
  for (std::size_t f = 0; f < fixed_effects.size(); ++f) {
    const std::set<std::string> levels(fixed_effects[f].begin(), fixed_effects[f].end());
    bool first = true;
    for (const auto& level : levels) {
      if (f > 0 && first) {
        first = false;
        continue;
      }
      first = false;
      Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) d(static_cast<Eigen::Index>(i)) = fixed_effects[f][i] == level ? 1.0 : 0.0;
      dummies.push_back(std::move(d));
      dummy_names.push_back("fe" + std::to_string(f) + ":" + level);
    }
  }
  Eigen::MatrixXd full(static_cast<Eigen::Index>(n), x.cols() + static_cast<Eigen::Index>(dummies.size()));
  full.leftCols(x.cols()) = x;
  for (std::size_t j = 0; j < dummies.size(); ++j) full.col(x.cols() + static_cast<Eigen::Index>(j)) = dummies[j];
  const auto p = static_cast<Eigen::Index>(names.size());
  std::vector<std::string> all = names;
  all.insert(all.end(), dummy_names.begin(), dummy_names.end());
  RegressionResult r = least_squares(y, full, std::move(all), se, 0, sst, "regressors collinear with fixed effects");
  r.names.resize(static_cast<std::size_t>(p));
  r.coef = r.coef.head(p).eval();
  r.se = r.se.head(p).eval();
  r.t = r.t.head(p).eval();
  return r;
}

int dissemination_window(double intercept, double slope, DecayForm form) {
  if (!(slope < 0.0)) throw ValidationError("no decay");
  auto positive = [&](double w) {
    const double g = form == DecayForm::linear ? w : std::exp(w);
    return intercept + slope * g > 0.0;
  };
  if (!positive(1.0)) return 0;
  const double cross = form == DecayForm::linear ? -intercept / slope : std::log(-intercept / slope);
  auto w = static_cast<long long>(std::max(1.0, std::floor(cross)));
  while (w > 1 && !positive(static_cast<double>(w))) --w;
  while (positive(static_cast<double>(w + 1))) ++w;
  return static_cast<int>(w);
}

double lasso_sparsity(const std::vector<Eigen::VectorXd>& coefficients) {
  if (coefficients.empty()) throw ValidationError("no models for sparsity");
  double total = 0.0;
  for (const auto& c : coefficients) {
    if (c.size() == 0) throw ValidationError("model without candidate signals");
    total += static_cast<double>((c.array() != 0.0).count()) / static_cast<double>(c.size());
  }
  return total / static_cast<double>(coefficients.size());
}

double lasso_sparsity(const std::vector<LinearModel>& models) {
  std::vector<Eigen::VectorXd> coefs;
  coefs.reserve(models.size());
  for (const auto& m : models) coefs.push_back(m.coef);
  return lasso_sparsity(coefs);
}

MonthlySeries to_monthly(const PortfolioSeries& daily) {
  MonthlySeries out;
  for (std::size_t i = 0; i < daily.size(); ++i) {
    const std::chrono::year_month_day ymd{daily.dates[i]};
    const std::chrono::year_month ym{ymd.year(), ymd.month()};
    if (out.months.empty() || out.months.back() != ym) {
      out.months.push_back(ym);
      out.returns.push_back(1.0);
    }
    out.returns.back() *= 1.0 + daily.returns[i];
  }
  for (auto& r : out.returns) r -= 1.0;
  return out;
}

RegressionResult importance_decay_regression(const std::vector<ImportanceRecord>& records, Algorithm algorithm,
                                             const ImportanceRegressionOptions& options) {
  std::set<std::pair<std::string, std::int64_t>> keep;
  if (options.positive_filter != nullptr) {
    for (const auto& r : *options.positive_filter) {
      // R2 is keyed by the forecast quarter, importance by the last training quarter
      if (r.algorithm == algorithm && r.r2 > 0.0) keep.insert({r.asset, r.quarter.index() - 1});
    }
  }
  std::vector<double> ys, gs;
  std::vector<std::string> clusters;
  for (const auto& r : records) {
    if (r.algorithm != algorithm) continue;
    if (options.positive_filter != nullptr && keep.count({r.asset, r.quarter.index()}) == 0) continue;
    ys.push_back(r.importance * options.scale);
    const double w = r.signal.lag_week;
    gs.push_back(options.form == DecayForm::linear ? w : std::exp(w));
    clusters.push_back(r.asset + "|" + r.quarter.str() + "|" + r.signal.source);
  }
  if (ys.empty()) throw ValidationError("no importance records for " + std::string(to_string(algorithm)));
  const auto n = static_cast<Eigen::Index>(ys.size());
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  Eigen::MatrixXd x(n, 2);
  x.col(0).setOnes();
  x.col(1) = Eigen::Map<Eigen::VectorXd>(gs.data(), n);
  const std::string slope = options.form == DecayForm::linear ? "lagged_week" : "exp_lagged_week";
  return ols(y, x, {"const", slope}, SeOptions::cluster(std::move(clusters)));
}

std::string stars(double t) {
  const double a = std::abs(t);
  if (a >= 2.576) return "***";
  if (a >= 1.96) return "**";
  if (a >= 1.645) return "*";
  return "";
}

std::string format_regression_table(const std::vector<std::string>& column_titles,
                                    const std::vector<RegressionResult>& columns, int digits) {
  if (column_titles.size() != columns.size()) throw ValidationError("one title per column required");
  std::vector<std::string> rows;
  for (const auto& c : columns) {
    for (const auto& name : c.names) {
      if (std::find(rows.begin(), rows.end(), name) == rows.end()) rows.push_back(name);
    }
  }
  constexpr int label_w = 20;
  constexpr int cell_w = 16;
  std::ostringstream os;
  os << std::left << std::setw(label_w) << "";
  for (const auto& t : column_titles) os << std::right << std::setw(cell_w) << t;
  os << "\n";
  for (const auto& name : rows) {
    std::ostringstream coef_line, t_line;
    coef_line << std::left << std::setw(label_w) << name;
    t_line << std::left << std::setw(label_w) << "";
    for (const auto& c : columns) {
      auto it = std::find(c.names.begin(), c.names.end(), name);
      std::string a, b;
      if (it != c.names.end()) {
        const auto j = it - c.names.begin();
        std::ostringstream ca, cb;
        ca << std::fixed << std::setprecision(digits) << c.coef(j) << stars(c.t(j));
        cb << "(" << std::fixed << std::setprecision(2) << c.t(j) << ")";
        a = ca.str();
        b = cb.str();
      }
      coef_line << std::right << std::setw(cell_w) << a;
      t_line << std::right << std::setw(cell_w) << b;
    }
    os << coef_line.str() << "\n" << t_line.str() << "\n";
  }
  os << std::left << std::setw(label_w) << "N";
  for (const auto& c : columns) os << std::right << std::setw(cell_w) << c.n;
  os << "\n" << std::left << std::setw(label_w) << "R2";
  for (const auto& c : columns) {
    std::ostringstream cr;
    cr << std::fixed << std::setprecision(4) << c.r2;
    os << std::right << std::setw(cell_w) << cr.str();
  }
  os << "\n";
  return os.str();
}

}  // namespace sigradar
