#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "mfd/kernels.hpp"
#include "mfd/lowlevel.hpp"
#include "mfd/random.hpp"
#include "mfd/synth.hpp"

using namespace mfd;

namespace {

void bench_gemm(benchmark::State& state, ExecPolicy policy) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> a(n * n), b(n * n), c(n * n);
  for (auto& x : a) x = rng.uniform(-1, 1);
  for (auto& x : b) x = rng.uniform(-1, 1);
  kernels::GemmArgs args;
  args.m = args.n = args.k = n;
  args.a = a.data();
  args.b = b.data();
  args.c = c.data();
  for (auto _ : state) {
    kernels::gemm(args, policy);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * 2 * n * n * n));
}

void bench_features(benchmark::State& state, ExecPolicy policy) {
  Rng rng(2);
  std::vector<std::string> sentences;
  for (int i = 0; i < state.range(0); ++i) sentences.push_back(synth_human_sentence(rng));
  for (auto _ : state) benchmark::DoNotOptimize(extract_lowlevel_batch(sentences, policy));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(bench_gemm, serial, ExecPolicy::serial)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK_CAPTURE(bench_gemm, parallel, ExecPolicy::parallel)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK_CAPTURE(bench_features, serial, ExecPolicy::serial)->Arg(512);
BENCHMARK_CAPTURE(bench_features, parallel, ExecPolicy::parallel)->Arg(512);

BENCHMARK_MAIN();
