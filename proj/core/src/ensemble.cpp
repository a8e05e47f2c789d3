#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigradar/error.hpp"
#include "sigradar/tree.hpp"

namespace sigradar {

double TreeEnsemble::tree_weight() const {
  if (kind == Kind::boosting) return learning_rate;
  return trees.empty() ? 0.0 : 1.0 / static_cast<double>(trees.size());
}

double TreeEnsemble::predict_row(const Eigen::MatrixXd& x, Eigen::Index row) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict_row(x, row);
  return offset() + tree_weight() * sum;
}

Eigen::VectorXd TreeEnsemble::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out(r) = predict_row(x, r);
  return out;
}

namespace {

std::size_t fraction_count(double fraction, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-12));
  return std::clamp<std::size_t>(k, n == 0 ? 0 : 1, n);
}

void check_inputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw ValidationError("design/target row mismatch");
  if (x.rows() == 0) throw ValidationError("empty training set");
  if (!x.allFinite() || !y.allFinite()) throw ValidationError("non-finite inputs");
}

}  // namespace

TreeEnsemble fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const ForestParams& hp, std::uint64_t seed) {
  validate(hp);
  check_inputs(x, y);
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t draw = fraction_count(hp.max_samples, n);
  const TreeGrowOptions grow{hp.max_depth, hp.min_samples_leaf, hp.max_features};

  TreeEnsemble ens;
  ens.kind = TreeEnsemble::Kind::forest;
  Rng rng(seed);
  std::vector<std::size_t> rows(draw);
  for (int t = 0; t < hp.n_estimators; ++t) {
    Rng tree_rng(rng.fork());
    for (auto& r : rows) r = tree_rng.index(n);
    ens.trees.push_back(grow_tree(x, y, rows, grow, tree_rng));
  }
  return ens;
}

TreeEnsemble fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const BoostingParams& hp, std::uint64_t seed) {
  validate(hp);
  check_inputs(x, y);
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t draw = fraction_count(hp.subsample, n);
  const TreeGrowOptions grow{hp.max_depth, hp.min_samples_leaf, hp.max_features};

  TreeEnsemble ens;
  ens.kind = TreeEnsemble::Kind::boosting;
  ens.learning_rate = hp.learning_rate;
  ens.base = y.mean();

  Eigen::VectorXd fitted = Eigen::VectorXd::Constant(x.rows(), ens.base);
  Eigen::VectorXd resid = y - fitted;
  ens.stage_mse.push_back(resid.squaredNorm() / static_cast<double>(n));

  Rng rng(seed);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> rows;
  for (int m = 0; m < hp.n_estimators; ++m) {
    Rng stage_rng(rng.fork());
    if (draw == n) {
      rows = all;
    } else {
      // partial Fisher-Yates over row indices, kept in ascending order
      std::vector<std::size_t> pool = all;
      for (std::size_t i = 0; i < draw; ++i) std::swap(pool[i], pool[i + stage_rng.index(n - i)]);
      rows.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(draw));
      std::sort(rows.begin(), rows.end());
    }
    RegressionTree tree = grow_tree(x, resid, rows, grow, stage_rng);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      fitted(r) += hp.learning_rate * tree.predict_row(x, r);
    }
    resid = y - fitted;
    ens.stage_mse.push_back(resid.squaredNorm() / static_cast<double>(n));
    ens.trees.push_back(std::move(tree));
  }
  return ens;
}

}  // namespace sigradar
