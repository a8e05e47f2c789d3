#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace sigradar {

struct LinearModel {
  double intercept = 0.0;
  Eigen::VectorXd coef;
  bool rank_deficient = false;  // OLS fell back to the minimum-norm solution
  std::size_t sweeps = 0;       // coordinate-descent sweeps used (0 for OLS)

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// Least squares with an unpenalized intercept. Requires rows >= columns + 1.
LinearModel fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct CoordinateDescentOptions {
  double tolerance = 1e-7;     // max absolute coefficient change per sweep
  std::size_t max_sweeps = 100000;
};

/// Cyclic coordinate descent on
///   (1/2n)||y - b0 - X beta||^2 + alpha * (l1_ratio ||beta||_1 + (1 - l1_ratio)/2 ||beta||^2)
/// with the intercept b0 unpenalized. Throws ConvergenceError after max_sweeps.
LinearModel fit_elastic_net(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                            double l1_ratio, const CoordinateDescentOptions& options = {});

inline LinearModel fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                             const CoordinateDescentOptions& options = {}) {
  return fit_elastic_net(x, y, alpha, 1.0, options);
}

/// Largest |x_j' r / n| over zero coefficients and largest deviation of
/// x_j' r / n from alpha*l1_ratio*sign(beta_j) + alpha*(1-l1_ratio)*beta_j over
/// nonzero ones. Zero at an exact optimum.
double kkt_violation(const LinearModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     double alpha, double l1_ratio = 1.0);

}  // namespace sigradar
