#include <benchmark/benchmark.h>

#include <vector>

#include "unimotion/artattention.hpp"
#include "unimotion/synth.hpp"
#include "unimotion/temporal_ops.hpp"

namespace um = unimotion;

static void BM_TemporalWeights(benchmark::State& state) {
  std::vector<double> centers(static_cast<std::size_t>(state.range(0)));
  for (std::size_t j = 0; j < centers.size(); ++j) centers[j] = 0.1 * static_cast<double>(j);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(um::temporal_weights(x, centers, 1.0));
    x += 1e-3;
  }
}
BENCHMARK(BM_TemporalWeights)->Arg(4)->Arg(16)->Arg(32);

static void BM_Resample(benchmark::State& state) {
  const auto seq = um::synth_motion(um::SynthPattern::SineWalk,
                                    static_cast<std::size_t>(state.range(0)), 60.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(um::resample(seq, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Resample)->Arg(60)->Arg(240);

static void BM_DeskForward(benchmark::State& state) {
  const um::Denoiser model(um::ModelConfig::from_preset("desk"), 1);
  const auto frames = static_cast<std::size_t>(state.range(0));
  const auto x = um::synth_motion(um::SynthPattern::SineWalk, frames, 30.0, 2);
  const um::BodyPartMask drop(frames, um::MaskConvention::Drop);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(x, 100, drop, um::ConditionSet{}, "all"));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DeskForward)->Arg(16)->Arg(64);

static void BM_TinyForward(benchmark::State& state) {
  const um::Denoiser model(um::ModelConfig::from_preset("tiny"), 1);
  const auto x = um::synth_motion(um::SynthPattern::SineWalk, 32, 30.0, 2);
  const um::BodyPartMask drop(32, um::MaskConvention::Drop);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(x, 100, drop, um::ConditionSet{}, "all"));
  }
}
BENCHMARK(BM_TinyForward)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
