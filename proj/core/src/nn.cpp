#include "sigradar/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sigradar/error.hpp"

namespace sigradar {

namespace {

// Forward pass keeping pre-activations; columns are samples.
struct Trace {
  std::vector<Eigen::MatrixXd> pre;   // z per layer
  std::vector<Eigen::MatrixXd> post;  // activation input to each layer (post[0] = x')
};

Trace forward(const NeuralNet& net, const Eigen::MatrixXd& x) {
  Trace t;
  t.post.push_back(x.transpose());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    Eigen::MatrixXd z = layer.weights * t.post.back();
    z.colwise() += layer.bias;
    t.pre.push_back(z);
    if (l + 1 < net.layers.size()) t.post.push_back(z.cwiseMax(0.0));
  }
  return t;
}

double l1_norm(const NeuralNet& net) {
  double s = 0.0;
  for (const auto& layer : net.layers) s += layer.weights.cwiseAbs().sum();
  return s;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Eigen::VectorXd NeuralNet::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_count()) {
    throw ValidationError("column mismatch: network expects " + std::to_string(input_count()) +
                          " features, got " + std::to_string(x.cols()));
  }
  return forward(*this, x).pre.back().row(0).transpose();
}

NeuralNet init_network(Eigen::Index inputs, int n_layers, int n_neurons, Rng& rng) {
  NeuralNet net;
  Eigen::Index fan_in = inputs;
  auto add = [&](Eigen::Index fan_out) {
    DenseLayer layer;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    layer.weights.resize(fan_out, fan_in);
    // fill row-major so the draw order does not depend on Eigen storage order
    for (Eigen::Index i = 0; i < fan_out; ++i) {
      for (Eigen::Index j = 0; j < fan_in; ++j) layer.weights(i, j) = rng.uniform(-limit, limit);
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    net.layers.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (int l = 0; l < n_layers; ++l) add(n_neurons);
  add(1);
  return net;
}

NetGradient loss_and_gradient(const NeuralNet& net, const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y, double l1) {
  const Trace t = forward(net, x);
  const auto batch = static_cast<double>(x.rows());
  const Eigen::RowVectorXd err = t.pre.back().row(0) - y.transpose();

  NetGradient g;
  g.loss = err.squaredNorm() / batch + l1 * l1_norm(net);
  g.grad.resize(net.layers.size());

  Eigen::MatrixXd delta = 2.0 / batch * err;  // dLoss/dz for the output layer
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const auto& layer = net.layers[l];
    auto& out = g.grad[l];
    out.weights = delta * t.post[l].transpose();
    out.weights += l1 * layer.weights.unaryExpr(&sign);
    out.bias = delta.rowwise().sum();
    if (l > 0) {
      delta = (layer.weights.transpose() * delta).cwiseProduct(
          t.pre[l - 1].unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    }
  }
  return g;
}

NeuralNet fit_nn(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const NetParams& hp,
                 std::uint64_t seed) {
  validate(hp);
  if (x.rows() != y.size()) throw ValidationError("design/target row mismatch");
  if (x.rows() == 0) throw ValidationError("empty training set");
  if (!x.allFinite() || !y.allFinite()) throw ValidationError("non-finite inputs");

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;

  Rng rng(seed);
  NeuralNet net = init_network(x.cols(), hp.n_layers, hp.n_neurons, rng);

  std::vector<DenseLayer> m(net.layers.size()), v(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    m[l].weights = Eigen::MatrixXd::Zero(net.layers[l].weights.rows(), net.layers[l].weights.cols());
    m[l].bias = Eigen::VectorXd::Zero(net.layers[l].bias.size());
    v[l] = m[l];
  }

  const auto n = static_cast<std::size_t>(x.rows());
  const auto batch = std::min<std::size_t>(static_cast<std::size_t>(hp.batch_size), n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  auto full_mse = [&] { return (net.predict(x) - y).squaredNorm() / static_cast<double>(n); };
  net.epoch_mse.push_back(full_mse());

  std::size_t step = 0;
  Eigen::MatrixXd xb;
  Eigen::VectorXd yb;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(len), x.cols());
      yb.resize(static_cast<Eigen::Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        const auto r = static_cast<Eigen::Index>(order[start + i]);
        xb.row(static_cast<Eigen::Index>(i)) = x.row(r);
        yb(static_cast<Eigen::Index>(i)) = y(r);
      }
      ++step;
      const NetGradient g = loss_and_gradient(net, xb, yb, hp.l1);
      if (!std::isfinite(g.loss)) throw NonFiniteLossError(step);

      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      auto update = [&](auto& param, auto& mom, auto& vel, const auto& grad) {
        mom = beta1 * mom + (1.0 - beta1) * grad;
        vel = beta2 * vel + (1.0 - beta2) * grad.cwiseProduct(grad);
        param.array() -= hp.learning_rate * (mom.array() / c1) / ((vel.array() / c2).sqrt() + eps);
      };
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        update(net.layers[l].weights, m[l].weights, v[l].weights, g.grad[l].weights);
        update(net.layers[l].bias, m[l].bias, v[l].bias, g.grad[l].bias);
      }
    }
    const double mse = full_mse();
    if (!std::isfinite(mse)) throw NonFiniteLossError(step);
    net.epoch_mse.push_back(mse);
  }
  return net;
}

}  // namespace sigradar
