#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sigradar/calendar.hpp"
#include "sigradar/hyperparameters.hpp"
#include "sigradar/linear.hpp"
#include "sigradar/panel.hpp"
#include "sigradar/portfolio.hpp"
#include "sigradar/radar.hpp"

namespace sigradar {

/// 1 - sum (r - rhat)^2 / sum r^2, no demeaning.
double r2_oos(const Eigen::VectorXd& realized, const Eigen::VectorXd& predicted);

struct R2Record {
  std::string asset;
  Quarter quarter;
  Algorithm algorithm = Algorithm::lasso;
  double r2 = 0.0;
};

/// One R2 per (asset, forecast quarter, algorithm) from daily forecasts.
/// Groups whose realized returns are all zero are dropped.
std::vector<R2Record> stock_quarter_r2(const std::vector<Forecast>& forecasts, const ReturnPanel& realized);

inline const std::vector<double> kR2Percentiles{99, 95, 90, 75, 50, 25, 10, 5};

struct R2AlgoSummary {
  std::size_t count = 0;
  double fraction_positive = 0.0;
  double mean_positive = 0.0;  // 0 when nothing is positive
  std::vector<double> percentiles;  // aligned with kR2Percentiles
};

struct R2Summary {
  std::map<Algorithm, R2AlgoSummary> by_algorithm;
  double union_fraction = 0.0;  // stock-quarters positive under at least one algorithm
  std::size_t stock_quarters = 0;
};

R2Summary summarize_r2(const std::vector<R2Record>& records);

/// Linear-interpolated percentile (q in [0, 100]) of unsorted values.
double percentile(std::vector<double> values, double q);

enum class SeType { classic, robust_hc1, clustered };

std::string to_string(SeType t);

struct RegressionResult {
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::VectorXd t;
  Eigen::VectorXd residuals;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::size_t n = 0;
  SeType se_type = SeType::classic;

  double coef_of(const std::string& name) const;
  double t_of(const std::string& name) const;
};

struct SeOptions {
  SeType type = SeType::classic;
  std::vector<std::string> clusters;  // one key per row when clustered

  static SeOptions classic() { return {}; }
  static SeOptions hc1() { return {SeType::robust_hc1, {}}; }
  static SeOptions cluster(std::vector<std::string> keys) { return {SeType::clustered, std::move(keys)}; }
};

/// Least squares of y on the columns of x as given (add a column of ones for an
/// intercept). R2 is centered when `centered_r2` is set.
RegressionResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, std::vector<std::string> names,
                     const SeOptions& se = {}, bool centered_r2 = true);

struct FactorSeries {
  std::vector<std::string> names;
  std::map<Date, std::vector<double>> rows;  // one value per factor name
};

/// Regresses portfolio excess returns on a constant ("alpha") and the factors.
/// Uses HC1 standard errors.
RegressionResult factor_alpha(const PortfolioSeries& series, const std::map<Date, double>& rf,
                              const FactorSeries& factors);

enum class FeMethod { automatic, within, dummies };

/// OLS of y on x plus one set of dummies per key list. A single key list is
/// absorbed by within-demeaning under `automatic`; several are expanded. Only
/// the x coefficients are reported. x may have zero columns.
RegressionResult fe_regression(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                               std::vector<std::string> names,
                               const std::vector<std::vector<std::string>>& fixed_effects,
                               const SeOptions& se = {}, FeMethod method = FeMethod::automatic);

enum class DecayForm { linear, exponential };

/// Largest integer w >= 1 with intercept + slope * g(w) > 0, g(w) = w or e^w.
/// Returns 0 when the curve is already nonpositive at w = 1.
int dissemination_window(double intercept, double slope, DecayForm form);

/// Mean over models of the share of nonzero coefficients.
double lasso_sparsity(const std::vector<Eigen::VectorXd>& coefficients);
double lasso_sparsity(const std::vector<LinearModel>& models);

struct MonthlySeries {
  std::vector<std::chrono::year_month> months;
  std::vector<double> returns;
};

/// Compounds daily returns within each calendar month. Months without days are absent.
MonthlySeries to_monthly(const PortfolioSeries& daily);

struct ImportanceRegressionOptions {
  DecayForm form = DecayForm::exponential;
  double scale = 1e4;  // importance units in the reported coefficients
  // keep only stock-quarters whose R2 for that algorithm is positive; ignored when empty
  const std::vector<R2Record>* positive_filter = nullptr;
};

/// Importance regressed on a constant and g(lag week), clustered by
/// asset x quarter x source. One regression per algorithm.
RegressionResult importance_decay_regression(const std::vector<ImportanceRecord>& records,
                                             Algorithm algorithm,
                                             const ImportanceRegressionOptions& options = {});

/// "***" at |t| >= 2.576, "**" at 1.96, "*" at 1.645.
std::string stars(double t);

/// Coefficients with stars, t in parentheses below, then N and R2.
std::string format_regression_table(const std::vector<std::string>& column_titles,
                                    const std::vector<RegressionResult>& columns, int digits = 4);

}  // namespace sigradar
