#include "sigradar/model.hpp"

#include <algorithm>
#include <cmath>

#include "sigradar/error.hpp"

namespace sigradar {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ols: return "ols";
    case Algorithm::lasso: return "lasso";
    case Algorithm::elastic_net: return "enet";
    case Algorithm::random_forest: return "rf";
    case Algorithm::gradient_boosting: return "gb";
    case Algorithm::neural_net: return "nn";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view tag) {
  for (auto a : {Algorithm::ols, Algorithm::lasso, Algorithm::elastic_net, Algorithm::random_forest,
                 Algorithm::gradient_boosting, Algorithm::neural_net}) {
    if (tag == to_string(a)) return a;
  }
  throw ValidationError("unknown algorithm '" + std::string(tag) +
                        "' (expected ols, lasso, enet, rf, gb or nn)");
}

std::vector<Algorithm> parse_algorithm_list(std::string_view csv) {
  std::vector<Algorithm> out;
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    auto tok = csv.substr(0, comma);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (!tok.empty()) {
      const Algorithm a = parse_algorithm(tok);
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
    if (comma == std::string_view::npos) break;
    csv.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ValidationError("empty algorithm list");
  return out;
}

bool uses_standardized_inputs(Algorithm a) {
  return a == Algorithm::lasso || a == Algorithm::elastic_net || a == Algorithm::neural_net;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void validate(const LassoParams& hp) {
  require(hp.alpha >= 0.0 && std::isfinite(hp.alpha), "lasso.alpha must be >= 0");
}

void validate(const ElasticNetParams& hp) {
  require(hp.alpha >= 0.0 && std::isfinite(hp.alpha), "enet.alpha must be >= 0");
  require(hp.l1_ratio >= 0.0 && hp.l1_ratio <= 1.0, "enet.l1_ratio must be in [0, 1]");
}

void validate(const ForestParams& hp) {
  require(hp.n_estimators >= 1, "rf.n_estimators must be >= 1");
  require(hp.max_depth >= 1, "rf.max_depth must be >= 1");
  require(hp.min_samples_leaf >= 1, "rf.min_samples_leaf must be >= 1");
  require(hp.max_samples > 0.0 && hp.max_samples <= 1.0, "rf.max_samples must be in (0, 1]");
  require(hp.max_features > 0.0 && hp.max_features <= 1.0, "rf.max_features must be in (0, 1]");
}

void validate(const BoostingParams& hp) {
  require(hp.n_estimators >= 1, "gb.n_estimators must be >= 1");
  require(hp.max_depth >= 1, "gb.max_depth must be >= 1");
  require(hp.min_samples_leaf >= 1, "gb.min_samples_leaf must be >= 1");
  require(hp.learning_rate >= 0.0 && std::isfinite(hp.learning_rate),
          "gb.learning_rate must be >= 0");
  require(hp.subsample > 0.0 && hp.subsample <= 1.0, "gb.subsample must be in (0, 1]");
  require(hp.max_features > 0.0 && hp.max_features <= 1.0, "gb.max_features must be in (0, 1]");
}

void validate(const NetParams& hp) {
  require(hp.epochs >= 1, "nn.epochs must be >= 1");
  require(hp.batch_size >= 1, "nn.batch_size must be >= 1");
  require(hp.n_layers >= 1, "nn.n_layers must be >= 1");
  require(hp.n_neurons >= 1, "nn.n_neurons must be >= 1");
  require(hp.learning_rate > 0.0 && std::isfinite(hp.learning_rate),
          "nn.learning_rate must be > 0");
  require(hp.l1 >= 0.0 && std::isfinite(hp.l1), "nn.l1 must be >= 0");
}

void validate(const Hyperparameters& hp) {
  std::visit(
      [](const auto& p) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(p)>, OlsParams>) validate(p);
      },
      hp);
}

Algorithm algorithm_of(const Hyperparameters& hp) {
  static constexpr Algorithm order[] = {Algorithm::ols,           Algorithm::lasso,
                                        Algorithm::elastic_net,   Algorithm::random_forest,
                                        Algorithm::gradient_boosting, Algorithm::neural_net};
  return order[hp.index()];
}

Hyperparameters default_hyperparameters(Algorithm a) {
  switch (a) {
    case Algorithm::ols: return OlsParams{};
    case Algorithm::lasso: return LassoParams{};
    case Algorithm::elastic_net: return ElasticNetParams{};
    case Algorithm::random_forest: return ForestParams{};
    case Algorithm::gradient_boosting: return BoostingParams{};
    case Algorithm::neural_net: return NetParams{};
  }
  throw ValidationError("unknown algorithm");
}

Eigen::MatrixXd TrainedModel::transform(const Eigen::MatrixXd& x_raw) const {
  if (x_raw.cols() != feature_count) {
    throw ValidationError("column mismatch: model expects " + std::to_string(feature_count) +
                          " features, got " + std::to_string(x_raw.cols()));
  }
  return standardization ? standardization->apply(x_raw) : x_raw;
}

Eigen::VectorXd TrainedModel::predict_transformed(const Eigen::MatrixXd& x) const {
  return std::visit([&](const auto& s) -> Eigen::VectorXd { return s.predict(x); }, state);
}

Eigen::VectorXd TrainedModel::predict(const Eigen::MatrixXd& x_raw) const {
  return predict_transformed(transform(x_raw));
}

TrainedModel fit_model(const Hyperparameters& hp, const Eigen::MatrixXd& x_raw,
                       const Eigen::VectorXd& y, std::uint64_t seed) {
  validate(hp);
  TrainedModel model;
  model.algorithm = algorithm_of(hp);
  model.hyperparameters = hp;
  model.seed = seed;
  model.feature_count = x_raw.cols();

  Eigen::MatrixXd x_fit;
  const Eigen::MatrixXd* x = &x_raw;
  if (uses_standardized_inputs(model.algorithm)) {
    model.standardization = fit_standardization(x_raw);
    x_fit = model.standardization->apply(x_raw);
    x = &x_fit;
  }

  switch (model.algorithm) {
    case Algorithm::ols:
      model.state = fit_ols(*x, y);
      break;
    case Algorithm::lasso:
      model.state = fit_lasso(*x, y, std::get<LassoParams>(hp).alpha);
      break;
    case Algorithm::elastic_net: {
      const auto& p = std::get<ElasticNetParams>(hp);
      model.state = fit_elastic_net(*x, y, p.alpha, p.l1_ratio);
      break;
    }
    case Algorithm::random_forest:
      model.state = fit_random_forest(*x, y, std::get<ForestParams>(hp), seed);
      break;
    case Algorithm::gradient_boosting:
      model.state = fit_gradient_boosting(*x, y, std::get<BoostingParams>(hp), seed);
      break;
    case Algorithm::neural_net:
      model.state = fit_nn(*x, y, std::get<NetParams>(hp), seed);
      break;
  }
  return model;
}

}  // namespace sigradar
