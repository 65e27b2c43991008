#include <benchmark/benchmark.h>

#include "srxbar/device.hpp"
#include "srxbar/mapper.hpp"
#include "srxbar/rng.hpp"

using namespace srxbar;

namespace {

QuantizerTable make_quantizer(unsigned m, unsigned L) {
    DeviceSpec d;
    d.r_on_ohm = 1e3;
    d.r_off_ohm = 100e3;
    d.level_count = L;
    d.placement = LevelPlacement::log_in_conductance;
    return build_quantizer(derive_levels(d), m, NodeTopology::parallel, 0.0, 1.0);
}

void BM_QuantizeLookup(benchmark::State& state) {
    const QuantizerTable q =
        make_quantizer(static_cast<unsigned>(state.range(0)),
                       static_cast<unsigned>(state.range(1)));
    rng::Substream draw(1, {rng::Stream::generic, 0, 0, 0, 0});
    std::vector<double> ws(4096);
    for (double& w : ws) w = draw.uniform01();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(q.quantize(ws[i++ & 4095]));
    }
}
BENCHMARK(BM_QuantizeLookup)->Args({1, 4})->Args({3, 8})->Args({6, 12});

void BM_MapMatrix10x10(benchmark::State& state) {
    const unsigned m = static_cast<unsigned>(state.range(0));
    const unsigned L = static_cast<unsigned>(state.range(1));
    const QuantizerTable q = make_quantizer(m, L);
    NodeSpec node;
    node.memristors_per_node = m;
    node.device.r_on_ohm = 1e3;
    node.device.r_off_ohm = 100e3;
    node.device.level_count = L;
    node.device.placement = LevelPlacement::log_in_conductance;
    Matrix w(10, 10);
    rng::Substream draw(2, {rng::Stream::generic, 1, 0, 0, 0});
    for (double& x : w.data) x = 2.0 * draw.uniform01() - 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(map_matrix(w, q, node, true));
    }
}
BENCHMARK(BM_MapMatrix10x10)->Args({1, 2})->Args({3, 8})->Args({6, 12});

}  // namespace
