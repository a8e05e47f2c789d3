#include "sigradar/linear.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sigradar/error.hpp"

namespace sigradar {

namespace {

void require_finite(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw ValidationError("design has " + std::to_string(x.rows()) + " rows but target has " +
                          std::to_string(y.size()));
  }
  if (!x.allFinite() || !y.allFinite()) throw ValidationError("non-finite inputs");
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != coef.size()) {
    throw ValidationError("column mismatch: model expects " + std::to_string(coef.size()) +
                          " features, got " + std::to_string(x.cols()));
  }
  return (x * coef).array() + intercept;
}

LinearModel fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  require_finite(x, y);
  if (x.rows() < x.cols() + 1) throw ValidationError("underdetermined");
  const Eigen::RowVectorXd xbar = x.colwise().mean();
  const double ybar = y.mean();
  LinearModel m;
  m.coef = Eigen::VectorXd::Zero(x.cols());
  if (x.cols() > 0) {
    const Eigen::MatrixXd xc = x.rowwise() - xbar;
    const Eigen::VectorXd yc = y.array() - ybar;
    // complete orthogonal decomposition gives the minimum-norm solution when rank deficient
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
    m.rank_deficient = cod.rank() < x.cols();
    m.coef = cod.solve(yc);
  }
  m.intercept = ybar - xbar.dot(m.coef);
  return m;
}

LinearModel fit_elastic_net(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                            double l1_ratio, const CoordinateDescentOptions& options) {
  require_finite(x, y);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be >= 0");
  if (!(l1_ratio >= 0.0 && l1_ratio <= 1.0)) throw ValidationError("l1_ratio must be in [0, 1]");
  if (x.rows() < 1) throw ValidationError("empty design");

  const auto n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd xbar = x.colwise().mean();
  const double ybar = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - xbar;
  const Eigen::VectorXd z = xc.colwise().squaredNorm().transpose() / n;
  const double l1_pen = alpha * l1_ratio;
  const double l2_pen = alpha * (1.0 - l1_ratio);

  LinearModel m;
  m.coef = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd resid = y.array() - ybar;
  bool converged = x.cols() == 0;
  std::size_t sweep = 0;
  while (!converged && sweep < options.max_sweeps) {
    ++sweep;
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (z(j) == 0.0) continue;
      const double old = m.coef(j);
      const double rho = xc.col(j).dot(resid) / n + z(j) * old;
      const double updated = soft_threshold(rho, l1_pen) / (z(j) + l2_pen);
      const double delta = updated - old;
      if (delta != 0.0) {
        resid.noalias() -= delta * xc.col(j);
        m.coef(j) = updated;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    converged = max_delta < options.tolerance;
  }
  if (!converged) {
    throw ConvergenceError("coordinate descent did not converge in " +
                           std::to_string(options.max_sweeps) + " sweeps");
  }
  m.sweeps = sweep;
  m.intercept = ybar - xbar.dot(m.coef);
  return m;
}

double kkt_violation(const LinearModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     double alpha, double l1_ratio) {
  const Eigen::VectorXd resid = y - model.predict(x);
  const Eigen::VectorXd grad = x.transpose() * resid / static_cast<double>(x.rows());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < grad.size(); ++j) {
    const double b = model.coef(j);
    double v;
    if (b == 0.0) {
      v = std::max(0.0, std::abs(grad(j)) - alpha * l1_ratio);
    } else {
      const double sign = b > 0.0 ? 1.0 : -1.0;
      v = std::abs(grad(j) - alpha * l1_ratio * sign - alpha * (1.0 - l1_ratio) * b);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace sigradar
