#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "reloc/genealogy.hpp"
#include "reloc/ratefn.hpp"
#include "reloc/sim.hpp"
#include "reloc/verify.hpp"

namespace {

using namespace reloc;

const MemoryKernelSpec kMu1 = MemoryKernelSpec::mu1(1, 1);
const MemoryKernelSpec kMu2 = MemoryKernelSpec::mu2(1, 0.5);

void BM_BuildRunSequence(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kMu2, RunCount{n}, 1).count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildRunSequence)->Arg(1 << 14)->Arg(1 << 20);

void BM_SampleS(benchmark::State& state) {
  const double t = state.range(0);
  const RunSequence runs = RunSequence::build(RunLengthSpec::deterministic(1), kMu1, Horizon{t}, 1);
  const auto sampler = state.range(1) == 0 ? AncestrySampler::Skip : AncestrySampler::Bernoulli;
  Stream rng = Stream::derive(2, StreamTag::Test, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_S(runs, kMu1, t, rng, sampler).S);
}
BENCHMARK(BM_SampleS)->Args({1000, 0})->Args({1000, 1})->Args({100000, 0})->Args({100000, 1});

void BM_SampleSValue(benchmark::State& state) {
  const double t = std::exp(10.0);
  const RunSequence runs = RunSequence::build(RunLengthSpec::deterministic(1), kMu1, Horizon{t}, 1);
  Stream rng = Stream::derive(3, StreamTag::Test, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_S_value(runs, kMu1, t, rng));
}
BENCHMARK(BM_SampleSValue);

void BM_SimulateDirectVsTimeChange(benchmark::State& state) {
  const double t = 200;
  const RunSequence runs = RunSequence::build(RunLengthSpec::uniform_interval(0.5, 1.5), kMu2, Horizon{t}, 1);
  const MarkovModel bm = MarkovModel::brownian(1);
  const Point origin{0.0};
  Stream rng = Stream::derive(4, StreamTag::Test, 0);
  if (state.range(0) == 0) {
    for (auto _ : state) benchmark::DoNotOptimize(simulate_direct(runs, kMu2, bm, origin, t, rng).X[0]);
  } else {
    for (auto _ : state) benchmark::DoNotOptimize(simulate_timechange(runs, kMu2, bm, origin, t, rng)[0]);
  }
}
BENCHMARK(BM_SimulateDirectVsTimeChange)->Arg(0)->Arg(1);

void BM_ExactLogMgfLadder(benchmark::State& state) {
  const std::vector<double> ladder{1e4, 1e5, 1e6};
  const RunSequence runs = RunSequence::build(RunLengthSpec::deterministic(1), kMu1, Horizon{1e6}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(exact_log_mgf_B_ladder(runs, kMu1, ladder, 1.0).back());
}
BENCHMARK(BM_ExactLogMgfLadder)->Unit(benchmark::kMillisecond);

void BM_TailExponent(benchmark::State& state) {
  const RateFunction rf(RunLengthSpec::stretched_exp_tail(2, 1), MarkovModel::brownian(1));
  for (auto _ : state) benchmark::DoNotOptimize(tail_exponent(rf, 0.7));
}
BENCHMARK(BM_TailExponent);

void BM_ExactAncestryLaw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RunSequence runs = RunSequence::build(RunLengthSpec::deterministic(1), kMu2, RunCount{n}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(exact_ancestry_law(runs, n).size());
}
BENCHMARK(BM_ExactAncestryLaw)->Arg(8)->Arg(12);

}  // namespace
BENCHMARK_MAIN();
