#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sigradar/calendar.hpp"
#include "sigradar/hyperparameters.hpp"
#include "sigradar/model.hpp"
#include "sigradar/panel.hpp"

namespace sigradar {

// Maps each row of a feature matrix to a model output.
using BatchPredictor = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

/// Per-feature contributions relative to the expected output over a background
/// set (interventional value function). phi.sum() + base_value == output for
/// the exact methods.
struct Attribution {
  Eigen::VectorXd phi;
  double base_value = 0.0;
  double output = 0.0;
  Eigen::VectorXd std_error;  // sampled estimator only; empty otherwise
};

struct ImportanceRecord {
  std::string asset;
  Quarter quarter;
  Algorithm algorithm = Algorithm::lasso;
  SignalId signal;
  double importance = 0.0;  // raw target units, >= 0
};

/// |beta_j| of a linear model fitted on standardized inputs.
Eigen::VectorXd lasso_importance(const TrainedModel& model);

/// Exact attribution of a linear function: beta_j * (x_j - mean background x_j).
Attribution linear_shap(const LinearModel& model, const Eigen::VectorXd& x,
                        const Eigen::MatrixXd& background);

inline constexpr int kBruteForceMaxFeatures = 12;

/// Enumerates all 2^p coalitions. Requires p <= 12.
Attribution brute_force_shapley(const BatchPredictor& f, const Eigen::VectorXd& x,
                                const Eigen::MatrixXd& background);

/// Interventional TreeSHAP: exact background-conditioned Shapley values in
/// time linear in (leaves x depth) per tree and background row.
Attribution tree_shap(const RegressionTree& tree, const Eigen::VectorXd& x,
                      const Eigen::MatrixXd& background);
Attribution tree_shap(const TreeEnsemble& ensemble, const Eigen::VectorXd& x,
                      const Eigen::MatrixXd& background);
// phi for every row of x (rows x features).
Eigen::MatrixXd tree_shap_rows(const TreeEnsemble& ensemble, const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& background);

/// Monte-Carlo permutation estimator. Each permutation is evaluated against the
/// whole background set; std_error is the between-permutation standard error.
Attribution sampled_shapley(const BatchPredictor& f, const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& background, int n_permutations,
                            std::uint64_t seed);

enum class ShapMethod { tree_shap, sampled_shapley };

struct ImportanceOptions {
  std::size_t background_cap = 500;  // seeded subsample of training rows beyond this
  std::size_t sampled_background_cap = 64;
  int permutations = 16;
  std::uint64_t seed = 0;
};

/// Mean |phi_j| over the rows of a raw training block, using the block itself
/// (capped) as background.
Eigen::VectorXd mean_abs_importance(const TrainedModel& model, const Eigen::MatrixXd& block_raw,
                                    ShapMethod method, const ImportanceOptions& options = {});

/// Dispatches on the model's algorithm: |beta| for LASSO / Elastic Net / OLS,
/// TreeSHAP for forests and boosting, sampled Shapley for networks.
Eigen::VectorXd signal_importance(const TrainedModel& model, const Eigen::MatrixXd& block_raw,
                                  const ImportanceOptions& options = {});

}  // namespace sigradar
