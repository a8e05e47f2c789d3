#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sigradar/hyperparameters.hpp"
#include "sigradar/rng.hpp"

namespace sigradar {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // mean target of the node's training rows
  int samples = 0;     // training rows reaching the node (with bootstrap multiplicity)

  bool is_leaf() const { return feature < 0; }
};

/// Binary CART regression tree stored as a flat node array; node 0 is the root.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  double predict(std::span<const double> x) const;
  double predict_row(const Eigen::MatrixXd& x, Eigen::Index row) const;
  int depth() const;
  bool splits_on(int feature) const;

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeGrowOptions {
  int max_depth = 3;
  int min_samples_leaf = 1;
  double max_features = 1.0;  // fraction of columns considered per node
};

/// Grows one tree on the given row indices (duplicates allowed). Splits are the
/// best squared-error reduction over midpoints of sorted unique values among
/// ceil(max_features * p) randomly chosen columns; ties go to the lowest
/// column index, then the lowest threshold.
RegressionTree grow_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         std::span<const std::size_t> rows, const TreeGrowOptions& options,
                         Rng& rng);

struct TreeEnsemble {
  enum class Kind { forest, boosting };

  Kind kind = Kind::forest;
  double base = 0.0;           // boosting: initial constant F0
  double learning_rate = 1.0;  // boosting: per-tree shrinkage
  std::vector<RegressionTree> trees;
  std::vector<double> stage_mse;  // boosting: training MSE after F0 and each stage

  // Multiplier applied to each tree's output in the ensemble sum.
  double tree_weight() const;
  // Constant added to the weighted tree sum.
  double offset() const { return kind == Kind::boosting ? base : 0.0; }
  double predict_row(const Eigen::MatrixXd& x, Eigen::Index row) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

TreeEnsemble fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const ForestParams& hp, std::uint64_t seed);

TreeEnsemble fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const BoostingParams& hp, std::uint64_t seed);

}  // namespace sigradar
