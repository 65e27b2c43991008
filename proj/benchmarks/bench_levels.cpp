#include <benchmark/benchmark.h>

#include "srxbar/device.hpp"
#include "srxbar/levels.hpp"

using namespace srxbar;

namespace {

LevelSet log_levels(unsigned L) {
    DeviceSpec d;
    d.r_on_ohm = 1e3;
    d.r_off_ohm = 100e3;
    d.level_count = L;
    d.placement = LevelPlacement::log_in_conductance;
    return derive_levels(d);
}

void BM_CountUniqueLevels(benchmark::State& state) {
    const auto m = static_cast<unsigned>(state.range(0));
    const auto L = static_cast<unsigned>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(count_unique_levels(m, L));
    }
}
BENCHMARK(BM_CountUniqueLevels)->Args({6, 12})->Args({8, 12})->Args({30, 30});

void BM_EnumerateCatalog(benchmark::State& state) {
    const auto m = static_cast<unsigned>(state.range(0));
    const auto L = static_cast<unsigned>(state.range(1));
    const LevelSet levels = log_levels(L);
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_node_levels(levels, m));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(count_unique_levels(m, L)));
}
BENCHMARK(BM_EnumerateCatalog)->Args({3, 8})->Args({6, 12})->Args({8, 12});

}  // namespace
