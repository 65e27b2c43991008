#include <benchmark/benchmark.h>

#include <filesystem>

#include "srxbar/mapper.hpp"
#include "srxbar/net.hpp"
#include "srxbar/rng.hpp"

using namespace srxbar;

namespace {

struct ReadSetup {
    MappedMatrix mapped;
    std::vector<double> v;
};

ReadSetup make_setup(unsigned m, unsigned L) {
    DeviceSpec d;
    d.r_on_ohm = 1e3;
    d.r_off_ohm = 100e3;
    d.level_count = L;
    d.placement = LevelPlacement::log_in_conductance;
    NodeSpec node;
    node.memristors_per_node = m;
    node.device = d;
    const QuantizerTable q =
        build_quantizer(derive_levels(d), m, NodeTopology::parallel, 0.0, 1.0);
    Matrix w(10, 10);
    rng::Substream draw(3, {rng::Stream::generic, 0, 0, 0, 0});
    for (double& x : w.data) x = 2.0 * draw.uniform01() - 1.0;
    ReadSetup setup{map_matrix(w, q, node, true), std::vector<double>(10)};
    for (double& x : setup.v) x = draw.uniform01();
    return setup;
}

void BM_NoisyRead10x10(benchmark::State& state) {
    ReadSetup setup = make_setup(static_cast<unsigned>(state.range(0)),
                                 static_cast<unsigned>(state.range(1)));
    NonIdealityConfig cfg;
    cfg.master_seed = 11;
    cfg.read_noise_frac = state.range(2) ? 0.10 : 0.0;
    cfg.wire_enabled = state.range(2) != 0;
    cfg.read_instability_frac = state.range(2) ? 0.10 : 0.0;
    setup.mapped.crossbar.realize(cfg, 0);
    ReadOptions opts;
    opts.reference = &setup.mapped.reference;
    std::uint64_t trial = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            noisy_read(setup.mapped.crossbar, setup.v, cfg, trial++, opts));
    }
}
BENCHMARK(BM_NoisyRead10x10)
    ->Args({1, 2, 0})
    ->Args({6, 12, 0})
    ->Args({6, 12, 1});

void BM_MappedForward(benchmark::State& state) {
    const std::filesystem::path data_dir =
        std::filesystem::path(SRXBAR_SOURCE_DIR) / "data";
    const NetworkDef net = load_network_mxw(data_dir / "fixture_net.mxw");
    const Dataset data = load_dataset_csv(data_dir / "digits_test.csv");
    DeviceSpec d;
    d.r_on_ohm = 1e3;
    d.r_off_ohm = 100e3;
    d.placement = LevelPlacement::log_in_conductance;
    MappedNetwork mapped(net, static_cast<unsigned>(state.range(0)),
                         static_cast<unsigned>(state.range(1)), NodeTopology::parallel, d);
    NonIdealityConfig cfg;
    cfg.read_noise_frac = 0.0;
    mapped.realize(cfg, 0);
    std::size_t s = 0;
    for (auto _ : state) {
        const std::span<const double> row(
            data.features.data.data() + (s % data.size()) * data.features.cols,
            data.features.cols);
        benchmark::DoNotOptimize(mapped.forward_mapped(row, cfg, 0, s));
        ++s;
    }
}
BENCHMARK(BM_MappedForward)->Args({1, 8})->Args({2, 8});

}  // namespace
