#include "sigradar/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sigradar/error.hpp"

namespace sigradar {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Row-major flattening with explicit shape.
json mat(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd to_mat(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
    throw ValidationError("matrix data length does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = flat[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

json hp_json(const Hyperparameters& hp) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OlsParams>) {
          return json::object();
        } else if constexpr (std::is_same_v<T, LassoParams>) {
          return {{"alpha", p.alpha}};
        } else if constexpr (std::is_same_v<T, ElasticNetParams>) {
          return {{"alpha", p.alpha}, {"l1_ratio", p.l1_ratio}};
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          return {{"n_estimators", p.n_estimators}, {"max_depth", p.max_depth},
                  {"min_samples_leaf", p.min_samples_leaf}, {"max_samples", p.max_samples},
                  {"max_features", p.max_features}};
        } else if constexpr (std::is_same_v<T, BoostingParams>) {
          return {{"n_estimators", p.n_estimators}, {"max_depth", p.max_depth},
                  {"min_samples_leaf", p.min_samples_leaf}, {"learning_rate", p.learning_rate},
                  {"subsample", p.subsample}, {"max_features", p.max_features}};
        } else {
          return {{"epochs", p.epochs}, {"batch_size", p.batch_size}, {"n_layers", p.n_layers},
                  {"n_neurons", p.n_neurons}, {"learning_rate", p.learning_rate}, {"l1", p.l1}};
        }
      },
      hp);
}

Hyperparameters hp_from(Algorithm a, const json& j) {
  switch (a) {
    case Algorithm::ols: return OlsParams{};
    case Algorithm::lasso: return LassoParams{j.at("alpha").get<double>()};
    case Algorithm::elastic_net:
      return ElasticNetParams{j.at("alpha").get<double>(), j.at("l1_ratio").get<double>()};
    case Algorithm::random_forest:
      return ForestParams{j.at("n_estimators").get<int>(), j.at("max_depth").get<int>(),
                          j.at("min_samples_leaf").get<int>(), j.at("max_samples").get<double>(),
                          j.at("max_features").get<double>()};
    case Algorithm::gradient_boosting:
      return BoostingParams{j.at("n_estimators").get<int>(), j.at("max_depth").get<int>(),
                            j.at("min_samples_leaf").get<int>(),
                            j.at("learning_rate").get<double>(), j.at("subsample").get<double>(),
                            j.at("max_features").get<double>()};
    case Algorithm::neural_net:
      return NetParams{j.at("epochs").get<int>(), j.at("batch_size").get<int>(),
                       j.at("n_layers").get<int>(), j.at("n_neurons").get<int>(),
                       j.at("learning_rate").get<double>(), j.at("l1").get<double>()};
  }
  throw ValidationError("unknown algorithm");
}

json tree_json(const RegressionTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes()) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.samples});
  }
  return nodes;
}

RegressionTree tree_from(const json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j) {
    nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                     n.at(3).get<int>(), n.at(4).get<double>(), n.at(5).get<int>()});
  }
  return RegressionTree(std::move(nodes));
}

json state_json(const ModelState& s) {
  return std::visit(
      [](const auto& st) -> json {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return {{"kind", "linear"},
                  {"intercept", st.intercept},
                  {"coef", vec(st.coef)},
                  {"rank_deficient", st.rank_deficient},
                  {"sweeps", st.sweeps}};
        } else if constexpr (std::is_same_v<T, TreeEnsemble>) {
          json trees = json::array();
          for (const auto& t : st.trees) trees.push_back(tree_json(t));
          return {{"kind", "trees"},
                  {"ensemble", st.kind == TreeEnsemble::Kind::boosting ? "boosting" : "forest"},
                  {"base", st.base},
                  {"learning_rate", st.learning_rate},
                  {"stage_mse", st.stage_mse},
                  {"node_fields", {"feature", "threshold", "left", "right", "value", "samples"}},
                  {"trees", trees}};
        } else {
          json layers = json::array();
          for (const auto& l : st.layers) layers.push_back({{"weights", mat(l.weights)}, {"bias", vec(l.bias)}});
          return {{"kind", "network"},
                  {"activation", "relu"},
                  {"epoch_mse", st.epoch_mse},
                  {"layers", layers}};
        }
      },
      s);
}

ModelState state_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    LinearModel m;
    m.intercept = j.at("intercept").get<double>();
    m.coef = to_vec(j.at("coef"));
    m.rank_deficient = j.at("rank_deficient").get<bool>();
    m.sweeps = j.at("sweeps").get<std::size_t>();
    return m;
  }
  if (kind == "trees") {
    TreeEnsemble e;
    e.kind = j.at("ensemble").get<std::string>() == "boosting" ? TreeEnsemble::Kind::boosting
                                                              : TreeEnsemble::Kind::forest;
    e.base = j.at("base").get<double>();
    e.learning_rate = j.at("learning_rate").get<double>();
    e.stage_mse = j.at("stage_mse").get<std::vector<double>>();
    for (const auto& t : j.at("trees")) e.trees.push_back(tree_from(t));
    return e;
  }
  if (kind == "network") {
    if (j.at("activation").get<std::string>() != "relu") {
      throw ValidationError("unsupported activation " + j.at("activation").dump());
    }
    NeuralNet n;
    n.epoch_mse = j.at("epoch_mse").get<std::vector<double>>();
    for (const auto& l : j.at("layers")) n.layers.push_back({to_mat(l.at("weights")), to_vec(l.at("bias"))});
    for (std::size_t i = 1; i < n.layers.size(); ++i) {
      if (n.layers[i].weights.cols() != n.layers[i - 1].weights.rows()) {
        throw ValidationError("network layer shapes do not chain");
      }
    }
    return n;
  }
  throw ValidationError("unknown model state kind '" + kind + "'");
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  json j;
  j["format"] = "sigradar.model";
  j["version"] = kFormatVersion;
  j["algorithm"] = std::string(to_string(model.algorithm));
  j["seed"] = model.seed;
  j["feature_count"] = model.feature_count;
  j["hyperparameters"] = hp_json(model.hyperparameters);
  if (model.standardization) {
    j["standardization"] = {{"mean", vec(model.standardization->mean)},
                            {"sd", vec(model.standardization->sd)}};
  } else {
    j["standardization"] = nullptr;
  }
  j["state"] = state_json(model.state);
  return j.dump(1);
}

TrainedModel deserialize_model(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "sigradar.model") {
      throw ValidationError("not a sigradar model document");
    }
    if (j.at("version").get<int>() > kFormatVersion) {
      throw ValidationError("model format version " + j.at("version").dump() + " is newer than supported");
    }
    TrainedModel m;
    m.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.feature_count = j.at("feature_count").get<Eigen::Index>();
    m.hyperparameters = hp_from(m.algorithm, j.at("hyperparameters"));
    if (!j.at("standardization").is_null()) {
      m.standardization = StandardizationStats{to_vec(j["standardization"].at("mean")),
                                               to_vec(j["standardization"].at("sd"))};
    }
    m.state = state_from(j.at("state"));
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_model(model) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace sigradar
