#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sigradar {

enum class Algorithm { ols, lasso, elastic_net, random_forest, gradient_boosting, neural_net };

// Short tags used in files and on the command line: ols, lasso, enet, rf, gb, nn.
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view tag);
std::vector<Algorithm> parse_algorithm_list(std::string_view csv);
bool uses_standardized_inputs(Algorithm a);

struct OlsParams {};

struct LassoParams {
  double alpha = 1e-3;
};

struct ElasticNetParams {
  double alpha = 1e-3;
  double l1_ratio = 0.5;
};

struct ForestParams {
  int n_estimators = 100;
  int max_depth = 4;
  int min_samples_leaf = 5;
  double max_samples = 0.8;
  double max_features = 0.5;
};

struct BoostingParams {
  int n_estimators = 100;
  int max_depth = 3;
  int min_samples_leaf = 5;
  double learning_rate = 0.05;
  double subsample = 0.8;
  double max_features = 0.5;
};

struct NetParams {
  int epochs = 50;
  int batch_size = 32;
  int n_layers = 1;
  int n_neurons = 16;
  double learning_rate = 1e-3;
  double l1 = 1e-4;
};

using Hyperparameters =
    std::variant<OlsParams, LassoParams, ElasticNetParams, ForestParams, BoostingParams, NetParams>;

// Throws ValidationError when a value is outside its domain.
void validate(const LassoParams& hp);
void validate(const ElasticNetParams& hp);
void validate(const ForestParams& hp);
void validate(const BoostingParams& hp);
void validate(const NetParams& hp);
void validate(const Hyperparameters& hp);

Algorithm algorithm_of(const Hyperparameters& hp);
Hyperparameters default_hyperparameters(Algorithm a);

}  // namespace sigradar
