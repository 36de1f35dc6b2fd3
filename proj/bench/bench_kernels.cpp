// Serial reference vs OpenMP kernel. Thread count comes from OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "cgmodel/experiments.hpp"
#include "cgmodel/primes.hpp"
#include "cgmodel/sampler.hpp"
#include "cgmodel/singular_series.hpp"

using namespace cgmodel;

namespace {

const ModelParameters kParams{1, 16};

const SampledSet& million_sample() {
  static const SampledSet s = sample_range(2, 1'000'002, kParams);
  return s;
}

void BM_sample_range_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::sample_range(2, state.range(0), kParams));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_sample_range_parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sample_range(2, state.range(0), kParams));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_expected_count_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::expected_count(2, state.range(0), kParams));
}

void BM_expected_count_parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(expected_count(2, state.range(0), kParams));
}

void BM_count_goldbach_serial(benchmark::State& state) {
  const auto& s = million_sample();
  for (auto _ : state) benchmark::DoNotOptimize(serial::count_goldbach(s, 1'000'000));
}

void BM_count_goldbach_parallel(benchmark::State& state) {
  const auto& s = million_sample();
  for (auto _ : state) benchmark::DoNotOptimize(count_goldbach(s, 1'000'000));
}

void BM_count_twins_serial(benchmark::State& state) {
  const auto& s = million_sample();
  const auto fam = PolynomialFamily::parse("x, x+2");
  for (auto _ : state) benchmark::DoNotOptimize(serial::count_bateman_horn(s, fam, 1'000'000));
}

void BM_count_twins_parallel(benchmark::State& state) {
  const auto& s = million_sample();
  const auto fam = PolynomialFamily::parse("x, x+2");
  for (auto _ : state) benchmark::DoNotOptimize(count_bateman_horn(s, fam, 1'000'000));
}

const std::vector<std::uint64_t>& sweep_primes() {
  static const auto primes = PrimeTable(1'000'000).primes();
  return primes;
}

void BM_omega_sweep_serial(benchmark::State& state) {
  const auto fam = check_admissibility(PolynomialFamily::parse("x, x^2+x+1"));
  for (auto _ : state) benchmark::DoNotOptimize(serial::omega_sweep(fam, sweep_primes()));
}

void BM_omega_sweep_parallel(benchmark::State& state) {
  const auto fam = check_admissibility(PolynomialFamily::parse("x, x^2+x+1"));
  for (auto _ : state) benchmark::DoNotOptimize(omega_sweep(fam, sweep_primes()));
}

}  // namespace

BENCHMARK(BM_sample_range_serial)->Arg(1 << 20)->Arg(1 << 24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sample_range_parallel)->Arg(1 << 20)->Arg(1 << 24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_expected_count_serial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_expected_count_parallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_goldbach_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_goldbach_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_twins_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_twins_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_omega_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_omega_sweep_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
