#include <benchmark/benchmark.h>

#include "barron/construction.hpp"

namespace {

using namespace barron;

void BM_BuildClassifier(benchmark::State& state) {
  SlabSpecOptions o;
  o.d = 3;
  o.pieces = static_cast<std::size_t>(state.range(0));
  o.width = 64;
  o.c1 = 0.1;
  o.family = BoundaryFamily::cosine;
  const auto spec = make_slab_spec(o);
  for (auto _ : state) benchmark::DoNotOptimize(build_classifier(spec));
}
BENCHMARK(BM_BuildClassifier)->Arg(1)->Arg(4)->Arg(16);

void BM_FitCosineApproximant(benchmark::State& state) {
  const CosineHorizon f{{6.0, 3.0}, 0.2, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(fit_cosine_approximant(f, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_FitCosineApproximant)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
