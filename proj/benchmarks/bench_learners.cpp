#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "sigradar/linear.hpp"
#include "sigradar/shapley.hpp"
#include "sigradar/tree.hpp"

using namespace sigradar;

namespace {

// One stock-quarter's worth of rows: 252 days x 188 signals by default.
struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Data make_data(int rows, int cols) {
  Rng rng(42);
  Data d{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) d.x(i, j) = rng.normal();
    d.y(i) = 0.3 * d.x(i, 0) - 0.2 * d.x(i, 1) + 0.1 * d.x(i, 0) * d.x(i, 2) + rng.normal();
  }
  return d;
}

void bm_lasso(benchmark::State& state) {
  const Data d = make_data(252, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_lasso(d.x, d.y, 0.05).coef.data());
}
BENCHMARK(bm_lasso)->Arg(20)->Arg(188)->Unit(benchmark::kMicrosecond);

void bm_random_forest(benchmark::State& state) {
  const Data d = make_data(252, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_random_forest(d.x, d.y, ForestParams{}, 1).trees.size());
}
BENCHMARK(bm_random_forest)->Arg(20)->Arg(188)->Unit(benchmark::kMillisecond);

void bm_gradient_boosting(benchmark::State& state) {
  const Data d = make_data(252, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gradient_boosting(d.x, d.y, BoostingParams{}, 1).trees.size());
}
BENCHMARK(bm_gradient_boosting)->Arg(20)->Arg(188)->Unit(benchmark::kMillisecond);

void bm_tree_shap(benchmark::State& state) {
  const Data d = make_data(252, 20);
  const TreeEnsemble forest = fit_random_forest(d.x, d.y, ForestParams{}, 1);
  const Eigen::MatrixXd background = d.x.topRows(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tree_shap_rows(forest, d.x, background).data());
}
BENCHMARK(bm_tree_shap)->Arg(16)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
