// Copyright 2026 The SDMM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Wall-clock microbenchmarks. Counted operations are the primary cost metric;
// these numbers only show how the counts translate to time on this machine.

#include <benchmark/benchmark.h>

#include "sdmm/gasp.hpp"
#include "sdmm/matrix.hpp"
#include "sdmm/session.hpp"

namespace {

using namespace sdmm;

constexpr std::uint64_t kBenchPrime = 2305843009213693951ULL;  // 2^61 - 1

void BM_FieldMul(benchmark::State& state) {
  PrimeField f(kBenchPrime);
  SeededRandomSource rng(1);
  std::uint64_t a = f.raw_sample(rng), b = f.raw_sample(rng);
  for (auto _ : state) {
    a = f.raw_mul(a, b);
    benchmark::DoNotOptimize(a);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FieldMul);

void BM_FieldInv(benchmark::State& state) {
  PrimeField f(kBenchPrime);
  SeededRandomSource rng(2);
  std::uint64_t a = f.raw_sample(rng) | 1;
  for (auto _ : state) {
    a = f.raw_inv(a);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_FieldInv);

void multiply_bench(benchmark::State& state, MultiplyOptions opts) {
  const auto n = static_cast<std::size_t>(state.range(0));
  PrimeField f(kBenchPrime);
  SeededRandomSource rng(3);
  const auto a = MatrixF::random(n, n, f, rng);
  const auto b = MatrixF::random(n, n, f, rng);
  f.reset_counter();
  for (auto _ : state) benchmark::DoNotOptimize(multiply(a, b, f, opts));
  state.counters["muls"] = benchmark::Counter(double(f.counter().muls) / double(state.iterations()));
}

void BM_MatMulStandard(benchmark::State& state) { multiply_bench(state, {MultiplyAlgorithm::standard, 64}); }
BENCHMARK(BM_MatMulStandard)->RangeMultiplier(2)->Range(16, 256);

void BM_MatMulStrassen(benchmark::State& state) { multiply_bench(state, {MultiplyAlgorithm::strassen, 32}); }
BENCHMARK(BM_MatMulStrassen)->RangeMultiplier(2)->Range(16, 256);

struct Workload {
  GaspCode code;
  MatrixF a, b;
};

Workload make_workload(std::size_t n, std::size_t k) {
  SeededRandomSource rng(4);
  auto code = GaspCode::construct({k, k, 1, n, n, n}, 0, rng);
  PrimeField f(code.modulus());
  auto a = MatrixF::random(n, n, f, rng);
  auto b = MatrixF::random(n, n, f, rng);
  return {std::move(code), std::move(a), std::move(b)};
}

void BM_GaspEncode(benchmark::State& state) {
  const auto w = make_workload(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  PrimeField f(w.code.modulus());
  SeededRandomSource rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(gasp_encode(w.a, w.b, w.code, f, rng));
}
BENCHMARK(BM_GaspEncode)->Args({64, 2})->Args({64, 4})->Args({128, 4});

void BM_GaspDecode(benchmark::State& state) {
  const auto w = make_workload(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  PrimeField f(w.code.modulus());
  SeededRandomSource rng(6);
  std::vector<MatrixF> h;
  for (const auto& s : gasp_encode(w.a, w.b, w.code, f, rng))
    h.push_back(server_multiply(s.f, s.g, f, ServerAlgorithm::standard));
  for (auto _ : state) benchmark::DoNotOptimize(gasp_decode(h, w.code, f));
}
BENCHMARK(BM_GaspDecode)->Args({64, 2})->Args({64, 4})->Args({128, 4});

void BM_GaspSessionInproc(benchmark::State& state) {
  SessionConfig cfg;
  const auto n = static_cast<std::size_t>(state.range(0));
  cfg.params = {2, 2, 1, n, n, n};
  cfg.seed = 7;
  cfg.code = resolve_code(cfg);
  const auto [a, b] = random_inputs(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(run_gasp_session(cfg, a, b));
}
BENCHMARK(BM_GaspSessionInproc)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
