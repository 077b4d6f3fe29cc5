#include <benchmark/benchmark.h>

#include "cubecut/eval.hpp"
#include "cubecut/maxflow.hpp"
#include "cubecut/segment.hpp"

namespace {

using namespace cubecut;

const Phantom& phantom() {
  static const Phantom ph = [] {
    PhantomSpec spec = default_box_phantom();
    spec.noise_sigma = 5.0;
    spec.rng_seed = 7;
    spec.outliers = Outliers{5, 255.0, spec.box};
    return gen_phantom(spec);
  }();
  return ph;
}

Params params(int m, int k, int delta) {
  Params p;
  p.seed = default_box_phantom().box.center;
  p.m = m;
  p.k = k;
  p.delta = delta;
  return p;
}

void BM_BuildNetwork(benchmark::State& state) {
  const Params p = params(static_cast<int>(state.range(0)), 40, 2);
  const Template t = make_template(p);
  const SeedStats stats = seed_stats(phantom().volume, p.seed, p.stats_halfwidth);
  for (auto _ : state) benchmark::DoNotOptimize(build_network(t, phantom().volume, stats, p.delta));
  state.counters["nodes"] = static_cast<double>(t.node_count());
}
BENCHMARK(BM_BuildNetwork)->Arg(9)->Arg(15)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_MaxFlow(benchmark::State& state) {
  const Params p = params(static_cast<int>(state.range(0)), 40, static_cast<int>(state.range(1)));
  const Template t = make_template(p);
  const SeedStats stats = seed_stats(phantom().volume, p.seed, p.stats_halfwidth);
  const FlowNetwork net = build_network(t, phantom().volume, stats, p.delta);
  for (auto _ : state) benchmark::DoNotOptimize(bk_maxflow(net).flow_value);
  state.counters["arcs"] = static_cast<double>(net.arcs.size());
}
BENCHMARK(BM_MaxFlow)->Args({15, 0})->Args({15, 2})->Args({15, 8})->Args({25, 2})->Unit(benchmark::kMillisecond);

void BM_Segment(benchmark::State& state) {
  const Params p = params(15, static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(segment(phantom().volume, p).cut_value);
}
BENCHMARK(BM_Segment)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_GenPhantom(benchmark::State& state) {
  PhantomSpec spec = default_box_phantom();
  spec.noise_sigma = 5.0;
  for (auto _ : state) benchmark::DoNotOptimize(gen_phantom(spec).truth.count());
}
BENCHMARK(BM_GenPhantom)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
