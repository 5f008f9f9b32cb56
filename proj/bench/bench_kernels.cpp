// Serial reference vs OpenMP kernels, plus one full TrainableMap update under
// each backend. Sizes are square: rows = cols = state.range(0).

#include <benchmark/benchmark.h>

#include <vector>

#include "mhpm/kernels.hpp"
#include "mhpm/rng.hpp"
#include "mhpm/trainable_map.hpp"

using namespace mhpm;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

template <auto Affine>
void BM_Affine(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const auto W = random_vec(n * n, rng), b = random_vec(n, rng), x = random_vec(n, rng);
    std::vector<double> y(n);
    for (auto _ : state) {
        Affine(W, b, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <auto Transpose>
void BM_AffineTranspose(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    const auto W = random_vec(n * n, rng), d = random_vec(n, rng);
    std::vector<double> out(n);
    for (auto _ : state) {
        Transpose(W, n, n, d, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <auto Rank1>
void BM_Rank1(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    auto W = random_vec(n * n, rng);
    const auto d = random_vec(n, rng), x = random_vec(n, rng);
    for (auto _ : state) {
        Rank1(W, 1e-9, d, x);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

void BM_MapUpdate(benchmark::State& state, kernels::Backend backend) {
    const auto n = static_cast<std::size_t>(state.range(0));
    kernels::set_backend(backend);
    Rng rng(4);
    TrainableMap m = TrainableMap::uniform(n, n, n, rng, 0.1);
    const SignalVector x(random_vec(n, rng)), t(random_vec(n, rng));
    for (auto _ : state) benchmark::DoNotOptimize(m.update(x, t, 1e-6));
    kernels::set_backend(kernels::Backend::Serial);
}

}  // namespace

BENCHMARK(BM_Affine<kernels::serial::affine>)->Name("affine/serial")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_Affine<kernels::parallel::affine>)->Name("affine/parallel")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_AffineTranspose<kernels::serial::affine_transpose>)->Name("affine_transpose/serial")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_AffineTranspose<kernels::parallel::affine_transpose>)->Name("affine_transpose/parallel")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_Rank1<kernels::serial::rank1_update>)->Name("rank1_update/serial")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_Rank1<kernels::parallel::rank1_update>)->Name("rank1_update/parallel")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK_CAPTURE(BM_MapUpdate, serial, kernels::Backend::Serial)->RangeMultiplier(4)->Range(16, 512);
BENCHMARK_CAPTURE(BM_MapUpdate, parallel, kernels::Backend::Parallel)->RangeMultiplier(4)->Range(16, 512);

BENCHMARK_MAIN();
