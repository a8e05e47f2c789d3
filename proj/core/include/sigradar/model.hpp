#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "sigradar/hyperparameters.hpp"
#include "sigradar/linear.hpp"
#include "sigradar/nn.hpp"
#include "sigradar/panel.hpp"
#include "sigradar/tree.hpp"

namespace sigradar {

using ModelState = std::variant<LinearModel, TreeEnsemble, NeuralNet>;

/// One learner's fitted state for one training window. Immutable after fit.
struct TrainedModel {
  Algorithm algorithm = Algorithm::ols;
  Hyperparameters hyperparameters;
  ModelState state;
  // Present for learners trained on standardized inputs (LASSO, Elastic Net, NN).
  std::optional<StandardizationStats> standardization;
  std::uint64_t seed = 0;
  Eigen::Index feature_count = 0;

  const LinearModel* linear() const { return std::get_if<LinearModel>(&state); }
  const TreeEnsemble* ensemble() const { return std::get_if<TreeEnsemble>(&state); }
  const NeuralNet* network() const { return std::get_if<NeuralNet>(&state); }

  /// Raw features in, forecasts out. Applies the stored standardization first
  /// when present. Throws ValidationError on a column-count mismatch.
  Eigen::VectorXd predict(const Eigen::MatrixXd& x_raw) const;
  // Fitted function on already-transformed inputs.
  Eigen::VectorXd predict_transformed(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x_raw) const;
};

/// Fits the learner selected by hp on raw features. LASSO, Elastic Net and NN
/// are trained on inputs standardized with the training block's statistics,
/// and the statistics are attached for prediction time.
TrainedModel fit_model(const Hyperparameters& hp, const Eigen::MatrixXd& x_raw,
                       const Eigen::VectorXd& y, std::uint64_t seed);

}  // namespace sigradar
