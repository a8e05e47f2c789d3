#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sigradar/hyperparameters.hpp"
#include "sigradar/rng.hpp"

namespace sigradar {

struct DenseLayer {
  Eigen::MatrixXd weights;  // outputs x inputs
  Eigen::VectorXd bias;
};

/// Feedforward regressor: rectifier hidden layers and a single linear output.
struct NeuralNet {
  std::vector<DenseLayer> layers;
  std::vector<double> epoch_mse;  // full-sample training MSE before training and after each epoch

  Eigen::Index input_count() const { return layers.empty() ? 0 : layers.front().weights.cols(); }
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// Glorot-uniform weights, zero biases.
NeuralNet init_network(Eigen::Index inputs, int n_layers, int n_neurons, Rng& rng);

struct NetGradient {
  double loss = 0.0;  // mean squared error + l1 * sum |weights|
  std::vector<DenseLayer> grad;
};

/// Loss and its (sub)gradient with respect to every weight and bias.
NetGradient loss_and_gradient(const NeuralNet& net, const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y, double l1);

/// Mini-batch Adam (0.9 / 0.999 / 1e-8) for epochs * ceil(n / batch_size) steps.
/// Throws NonFiniteLossError carrying the step index if training diverges.
NeuralNet fit_nn(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const NetParams& hp,
                 std::uint64_t seed);

}  // namespace sigradar
