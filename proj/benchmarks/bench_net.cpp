#include <benchmark/benchmark.h>

#include "barron/dataset.hpp"
#include "barron/rng.hpp"
#include "barron/sampler.hpp"
#include "barron/trainer.hpp"

namespace {

using namespace barron;

Eigen::MatrixXd random_inputs(std::size_t d, Eigen::Index n) {
  CounterRng rng(1);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(d), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.uniform();
  }
  return x;
}

// Batched forward pass of the experiment architecture (3, 3N, 2N, N, 1).
void BM_Forward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Network net = init_network(std::vector<std::size_t>{3, 3 * n, 2 * n, n, 1}, 2);
  const Eigen::MatrixXd x = random_inputs(3, 4096);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(x));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(64)->Arg(256);

void BM_Backprop(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Network net = init_network(std::vector<std::size_t>{3, 3 * n, 2 * n, n, 1}, 3);
  const Eigen::MatrixXd x = random_inputs(3, 64);
  std::vector<int> y(64);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 2);
  for (auto _ : state) benchmark::DoNotOptimize(backprop_grad(net, x, y));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_Backprop)->Arg(16)->Arg(64)->Arg(256);

// One desk-scale training epoch over 2271 points.
void BM_TrainEpoch(benchmark::State& state) {
  const auto ds = sphere_shell_dataset(3, 2271, 4);
  const Network net = init_network(std::vector<std::size_t>{3, 48, 32, 16, 1}, 5);
  TrainConfig cfg = desk_scale_config();
  cfg.max_epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(net, ds, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.size()));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
