#include "sigradar/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sigradar/error.hpp"

namespace sigradar {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ValidationError("tree has no nodes");
  const int n = static_cast<int>(nodes_.size());
  for (const auto& node : nodes_) {
    if (!node.is_leaf() && (node.left <= 0 || node.right <= 0 || node.left >= n || node.right >= n)) {
      throw ValidationError("tree node has an out-of-range child");
    }
  }
}

double RegressionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(i)].value;
}

double RegressionTree::predict_row(const Eigen::MatrixXd& x, Eigen::Index row) const {
  int i = 0;
  while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    i = x(row, node.feature) <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(i)].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.is_leaf()) continue;
    d[static_cast<std::size_t>(node.left)] = d[i] + 1;
    d[static_cast<std::size_t>(node.right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

bool RegressionTree::splits_on(int feature) const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [feature](const TreeNode& n) { return n.feature == feature; });
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TreeGrowOptions& options,
              Rng& rng)
      : x_(x), y_(y), opt_(options), rng_(rng) {
    const auto p = static_cast<std::size_t>(x.cols());
    n_candidates_ = static_cast<std::size_t>(
        std::ceil(options.max_features * static_cast<double>(p) - 1e-12));
    n_candidates_ = std::clamp<std::size_t>(n_candidates_, p == 0 ? 0 : 1, p);
    all_features_.resize(p);
    std::iota(all_features_.begin(), all_features_.end(), 0);
  }

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0;
    bool constant = true;
    for (auto r : rows) {
      sum += y_(static_cast<Eigen::Index>(r));
      constant = constant && y_(static_cast<Eigen::Index>(r)) == y_(static_cast<Eigen::Index>(rows[0]));
    }
    const double n = static_cast<double>(rows.size());
    // a constant node keeps the exact target value rather than a rounded mean
    const double mean = rows.empty() ? 0.0 : constant ? y_(static_cast<Eigen::Index>(rows[0])) : sum / n;
    double sse = 0.0;
    for (auto r : rows) {
      const double d = y_(static_cast<Eigen::Index>(r)) - mean;
      sse += d * d;
    }
    nodes_[static_cast<std::size_t>(id)].value = mean;
    nodes_[static_cast<std::size_t>(id)].samples = static_cast<int>(rows.size());

    const auto min_leaf = static_cast<std::size_t>(std::max(1, opt_.min_samples_leaf));
    if (depth >= opt_.max_depth || rows.size() < 2 * min_leaf || constant) return id;

    const Split split = best_split(rows, sum, sse, min_leaf);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      (x_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int rr = grow(std::move(right), depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = rr;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    if (n_candidates_ >= all_features_.size()) return all_features_;
    std::vector<std::size_t> pool = all_features_;
    for (std::size_t i = 0; i < n_candidates_; ++i) {
      std::swap(pool[i], pool[i + rng_.index(pool.size() - i)]);
    }
    pool.resize(n_candidates_);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  Split best_split(const std::vector<std::size_t>& rows, double sum, double sse,
                   std::size_t min_leaf) {
    Split best;
    const double n = static_cast<double>(rows.size());
    const double parent = sum * sum / n;
    const double min_gain = 1e-12 * sse;
    std::vector<std::pair<double, double>> pts(rows.size());
    for (std::size_t f : candidate_features()) {
      const auto col = static_cast<Eigen::Index>(f);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        pts[i] = {x_(r, col), y_(r)};
      }
      std::sort(pts.begin(), pts.end());
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        left_sum += pts[i].second;
        if (pts[i].first == pts[i + 1].first) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = pts.size() - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - parent;
        if (gain > min_gain && gain > best.gain) {
          double thr = 0.5 * (pts[i].first + pts[i + 1].first);
          if (!(thr < pts[i + 1].first)) thr = pts[i].first;
          best = {static_cast<int>(f), thr, gain};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  TreeGrowOptions opt_;
  Rng& rng_;
  std::size_t n_candidates_ = 0;
  std::vector<std::size_t> all_features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree grow_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         std::span<const std::size_t> rows, const TreeGrowOptions& options,
                         Rng& rng) {
  if (x.rows() != y.size()) throw ValidationError("design/target row mismatch");
  if (options.max_depth < 0) throw ValidationError("max_depth must be >= 0");
  for (auto r : rows) {
    if (r >= static_cast<std::size_t>(x.rows())) throw ValidationError("row index out of range");
  }
  TreeBuilder builder(x, y, options, rng);
  return RegressionTree(builder.build({rows.begin(), rows.end()}));
}

}  // namespace sigradar
