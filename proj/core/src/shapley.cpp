#include "sigradar/shapley.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <numeric>

#include "sigradar/error.hpp"
#include "sigradar/rng.hpp"

namespace sigradar {

namespace {

void check_point(const Eigen::VectorXd& x, const Eigen::MatrixXd& background) {
  if (background.rows() == 0) throw ValidationError("empty background set");
  if (background.cols() != x.size()) {
    throw ValidationError("background has " + std::to_string(background.cols()) +
                          " columns, point has " + std::to_string(x.size()));
  }
}

constexpr int kMaxFactorial = 170;

const std::array<double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<double, kMaxFactorial + 1> t{};
    t[0] = 1.0;
    for (int i = 1; i <= kMaxFactorial; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i - 1)] * i;
    return t;
  }();
  return table;
}

double fact(int n) { return factorials()[static_cast<std::size_t>(n)]; }

// Interventional attribution for one tree. A row enters the walk only through
// the direction it takes at each internal node, so rows sharing a direction
// pattern are walked once and weighted by their count.
class TreeAttributor {
 public:
  explicit TreeAttributor(const RegressionTree& tree) : nodes_(tree.nodes()), slot_(nodes_.size(), -1) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!nodes_[i].is_leaf()) slot_[i] = internal_++;
    }
    for (const auto& n : nodes_) {
      if (!n.is_leaf() && std::find(features_.begin(), features_.end(), n.feature) == features_.end()) {
        features_.push_back(n.feature);
      }
    }
  }

  // Adds weight * phi(x_r; background) to row r of phi for every row of x.
  void accumulate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& background, double weight,
                  Eigen::MatrixXd& phi) {
    if (internal_ == 0) return;  // a single leaf attributes nothing
    std::vector<int> x_group;
    const auto x_keys = group(x, x_group);
    std::vector<int> z_group;
    const auto z_keys = group(background, z_group);
    std::vector<double> z_count(z_keys.size(), 0.0);
    for (int g : z_group) z_count[static_cast<std::size_t>(g)] += 1.0;

    const double per_row = weight / static_cast<double>(background.rows());
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x_keys.size()), x.cols());
    side_.assign(static_cast<std::size_t>(x.cols()), 0);
    for (std::size_t gx = 0; gx < x_keys.size(); ++gx) {
      xdir_ = &x_keys[gx];
      out_ = local.row(static_cast<Eigen::Index>(gx)).data();
      stride_ = local.rows();
      for (std::size_t gz = 0; gz < z_keys.size(); ++gz) {
        zdir_ = &z_keys[gz];
        scale_ = per_row * z_count[gz];
        visit(0);
      }
    }
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const auto g = static_cast<Eigen::Index>(x_group[static_cast<std::size_t>(r)]);
      for (int f : features_) phi(r, f) += local(g, f);
    }
  }

 private:
  // Direction pattern per row ('l' or 'r' per internal node); returns distinct patterns.
  std::vector<std::string> group(const Eigen::MatrixXd& m, std::vector<int>& group_of) const {
    std::vector<std::string> keys;
    std::map<std::string, int> index;
    group_of.resize(static_cast<std::size_t>(m.rows()));
    std::string key(static_cast<std::size_t>(internal_), 'l');
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TreeNode& n = nodes_[i];
        if (n.is_leaf()) continue;
        key[static_cast<std::size_t>(slot_[i])] = m(r, n.feature) <= n.threshold ? 'l' : 'r';
      }
      auto [it, fresh] = index.try_emplace(key, static_cast<int>(keys.size()));
      if (fresh) keys.push_back(key);
      group_of[static_cast<std::size_t>(r)] = it->second;
    }
    return keys;
  }

  void visit(int id) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    if (node.is_leaf()) {
      leaf(node.value);
      return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const auto s = static_cast<std::size_t>(slot_[static_cast<std::size_t>(id)]);
    const int x_child = (*xdir_)[s] == 'l' ? node.left : node.right;
    const int z_child = (*zdir_)[s] == 'l' ? node.left : node.right;
    if (side_[f] == 1) return visit(x_child);
    if (side_[f] == 2) return visit(z_child);
    if (x_child == z_child) return visit(x_child);
    side_[f] = 1;
    on_x_.push_back(node.feature);
    visit(x_child);
    on_x_.pop_back();
    side_[f] = 2;
    on_z_.push_back(node.feature);
    visit(z_child);
    on_z_.pop_back();
    side_[f] = 0;
  }

  void leaf(double value) {
    const int a = static_cast<int>(on_x_.size());
    const int b = static_cast<int>(on_z_.size());
    if (a + b > kMaxFactorial) throw ValidationError("tree too deep for exact attribution");
    const double v = value * scale_;
    if (a > 0) {
      const double w = fact(a - 1) * fact(b) / fact(a + b);
      for (int f : on_x_) out_[static_cast<Eigen::Index>(f) * stride_] += w * v;
    }
    if (b > 0) {
      const double w = fact(a) * fact(b - 1) / fact(a + b);
      for (int f : on_z_) out_[static_cast<Eigen::Index>(f) * stride_] -= w * v;
    }
  }

  const std::vector<TreeNode>& nodes_;
  std::vector<int> slot_;  // internal-node index, -1 for leaves
  int internal_ = 0;
  std::vector<int> features_;
  std::vector<char> side_;  // 0 unassigned, 1 follows x, 2 follows background
  std::vector<int> on_x_, on_z_;
  const std::string* xdir_ = nullptr;
  const std::string* zdir_ = nullptr;
  double scale_ = 1.0;
  double* out_ = nullptr;  // row of a column-major matrix
  Eigen::Index stride_ = 1;
};

std::vector<Eigen::Index> subsample_rows(Eigen::Index n, std::size_t cap, std::uint64_t seed) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  if (static_cast<std::size_t>(n) <= cap) return rows;
  Rng rng(seed);
  for (std::size_t i = 0; i < cap; ++i) std::swap(rows[i], rows[i + rng.index(rows.size() - i)]);
  rows.resize(cap);
  std::sort(rows.begin(), rows.end());
  return rows;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

}  // namespace

Eigen::VectorXd lasso_importance(const TrainedModel& model) {
  const auto* lin = model.linear();
  if (lin == nullptr) {
    throw ValidationError("coefficient importance needs a linear model, got " +
                          std::string(to_string(model.algorithm)));
  }
  return lin->coef.cwiseAbs();
}

Attribution linear_shap(const LinearModel& model, const Eigen::VectorXd& x,
                        const Eigen::MatrixXd& background) {
  check_point(x, background);
  const Eigen::VectorXd mu = background.colwise().mean().transpose();
  Attribution a;
  a.phi = model.coef.cwiseProduct(x - mu);
  a.base_value = model.intercept + model.coef.dot(mu);
  a.output = model.intercept + model.coef.dot(x);
  return a;
}

Attribution brute_force_shapley(const BatchPredictor& f, const Eigen::VectorXd& x,
                                const Eigen::MatrixXd& background) {
  check_point(x, background);
  const auto p = static_cast<int>(x.size());
  if (p > kBruteForceMaxFeatures) {
    throw ValidationError("brute-force Shapley supports p <= 12; use sampled method");
  }
  const std::size_t n_coalitions = std::size_t{1} << p;
  const Eigen::Index m = background.rows();
  std::vector<double> value(n_coalitions);
  Eigen::MatrixXd batch(m, p);
  for (std::size_t s = 0; s < n_coalitions; ++s) {
    batch = background;
    for (int j = 0; j < p; ++j) {
      if (s & (std::size_t{1} << j)) batch.col(j).setConstant(x(j));
    }
    value[s] = f(batch).mean();
  }
  Attribution a;
  a.phi = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < p; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t s = 0; s < n_coalitions; ++s) {
      if (s & bit) continue;
      const int size = std::popcount(s);
      const double w = fact(size) * fact(p - size - 1) / fact(p);
      a.phi(j) += w * (value[s | bit] - value[s]);
    }
  }
  a.base_value = value[0];
  a.output = value[n_coalitions - 1];
  return a;
}

Attribution tree_shap(const RegressionTree& tree, const Eigen::VectorXd& x,
                      const Eigen::MatrixXd& background) {
  check_point(x, background);
  Attribution a;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(1, x.size());
  TreeAttributor(tree).accumulate(x.transpose(), background, 1.0, phi);
  a.phi = phi.row(0).transpose();
  double base = 0.0;
  for (Eigen::Index r = 0; r < background.rows(); ++r) base += tree.predict_row(background, r);
  a.base_value = base / static_cast<double>(background.rows());
  a.output = tree.predict(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  return a;
}

Eigen::MatrixXd tree_shap_rows(const TreeEnsemble& ensemble, const Eigen::MatrixXd& x,
                               const Eigen::MatrixXd& background) {
  if (background.rows() == 0) throw ValidationError("empty background set");
  if (background.cols() != x.cols()) {
    throw ValidationError("background has " + std::to_string(background.cols()) + " columns, points have " +
                          std::to_string(x.cols()));
  }
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  const double w = ensemble.tree_weight();
  for (const auto& tree : ensemble.trees) TreeAttributor(tree).accumulate(x, background, w, phi);
  return phi;
}

Attribution tree_shap(const TreeEnsemble& ensemble, const Eigen::VectorXd& x,
                      const Eigen::MatrixXd& background) {
  check_point(x, background);
  Attribution a;
  const Eigen::MatrixXd row = x.transpose();
  a.phi = tree_shap_rows(ensemble, row, background).row(0).transpose();
  a.base_value = ensemble.predict(background).mean();
  a.output = ensemble.predict(row)(0);
  return a;
}

Attribution sampled_shapley(const BatchPredictor& f, const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& background, int n_permutations,
                            std::uint64_t seed) {
  check_point(x, background);
  if (n_permutations < 1) throw ValidationError("n_permutations must be >= 1");
  const Eigen::Index p = x.size();
  const Eigen::Index m = background.rows();

  Rng rng(seed);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), 0);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd batch(m * (p + 1), p);
  double base = 0.0, output = 0.0;
  for (int k = 0; k < n_permutations; ++k) {
    rng.shuffle(perm);
    // block s holds the background rows with the first s permuted features set to x
    for (Eigen::Index s = 0; s <= p; ++s) {
      auto block = batch.middleRows(s * m, m);
      if (s == 0) {
        block = background;
      } else {
        block = batch.middleRows((s - 1) * m, m);
        block.col(perm[static_cast<std::size_t>(s - 1)]).setConstant(x(perm[static_cast<std::size_t>(s - 1)]));
      }
    }
    const Eigen::VectorXd out = f(batch);
    Eigen::VectorXd v(p + 1);
    for (Eigen::Index s = 0; s <= p; ++s) v(s) = out.segment(s * m, m).mean();
    base = v(0);
    output = v(p);
    // Welford update per feature
    const double count = k + 1.0;
    for (Eigen::Index s = 1; s <= p; ++s) {
      const Eigen::Index j = perm[static_cast<std::size_t>(s - 1)];
      const double contrib = v(s) - v(s - 1);
      const double delta = contrib - mean(j);
      mean(j) += delta / count;
      m2(j) += delta * (contrib - mean(j));
    }
  }
  Attribution a;
  a.phi = mean;
  a.base_value = base;
  a.output = output;
  if (n_permutations > 1) {
    a.std_error = (m2.array() / (n_permutations - 1.0) / n_permutations).sqrt();
  } else {
    a.std_error = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::infinity());
  }
  return a;
}

Eigen::VectorXd mean_abs_importance(const TrainedModel& model, const Eigen::MatrixXd& block_raw,
                                    ShapMethod method, const ImportanceOptions& options) {
  if (block_raw.rows() == 0) throw ValidationError("empty training block");
  if (block_raw.cols() != model.feature_count) {
    throw ValidationError("column mismatch: model expects " + std::to_string(model.feature_count) +
                          " features, got " + std::to_string(block_raw.cols()));
  }
  Eigen::VectorXd total = Eigen::VectorXd::Zero(block_raw.cols());
  if (method == ShapMethod::tree_shap) {
    const auto* ens = model.ensemble();
    if (ens == nullptr) throw ValidationError("tree_shap needs a tree ensemble");
    // trees consume raw features unless the model carries standardization
    const Eigen::MatrixXd x = model.transform(block_raw);
    const Eigen::MatrixXd bg = take_rows(x, subsample_rows(x.rows(), options.background_cap, options.seed));
    total = tree_shap_rows(*ens, x, bg).cwiseAbs().colwise().sum().transpose();
  } else {
    const Eigen::MatrixXd bg =
        take_rows(block_raw, subsample_rows(block_raw.rows(), options.sampled_background_cap, options.seed));
    const BatchPredictor f = [&model](const Eigen::MatrixXd& m) { return model.predict(m); };
    Rng rng(options.seed);
    for (Eigen::Index r = 0; r < block_raw.rows(); ++r) {
      const auto a = sampled_shapley(f, block_raw.row(r).transpose(), bg, options.permutations, rng.fork());
      total += a.phi.cwiseAbs();
    }
  }
  return total / static_cast<double>(block_raw.rows());
}

Eigen::VectorXd signal_importance(const TrainedModel& model, const Eigen::MatrixXd& block_raw,
                                  const ImportanceOptions& options) {
  switch (model.algorithm) {
    case Algorithm::ols:
    case Algorithm::lasso:
    case Algorithm::elastic_net:
      return lasso_importance(model);
    case Algorithm::random_forest:
    case Algorithm::gradient_boosting:
      return mean_abs_importance(model, block_raw, ShapMethod::tree_shap, options);
    case Algorithm::neural_net:
      return mean_abs_importance(model, block_raw, ShapMethod::sampled_shapley, options);
  }
  throw ValidationError("unknown algorithm");
}

}  // namespace sigradar
