#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "srxbar/net.hpp"

using namespace srxbar;

namespace {

const std::filesystem::path kDataDir = std::filesystem::path(SRXBAR_SOURCE_DIR) / "data";

NetworkDef identity_net(unsigned n) {
    NetworkDef net;
    net.input = {1, 1, n};
    LayerDef dense;
    dense.kind = LayerDef::Kind::dense;
    dense.n_in = n;
    dense.n_out = n;
    net.layers.push_back(dense);
    net.layers.push_back({LayerDef::Kind::softmax_argmax});
    Matrix w(n, n, 0.0);
    for (unsigned i = 0; i < n; ++i) w.at(i, i) = 1.0;
    net.weights.push_back(std::move(w));
    return net;
}

DeviceSpec log_device() {
    DeviceSpec d;
    d.r_on_ohm = 1e3;
    d.r_off_ohm = 100e3;
    d.placement = LevelPlacement::log_in_conductance;
    return d;
}

}  // namespace

TEST_CASE("forward_float on an identity network routes one-hot inputs") {
    const NetworkDef net = identity_net(5);
    for (unsigned c = 0; c < 5; ++c) {
        std::vector<double> x(5, 0.0);
        x[c] = 1.0;
        CHECK(forward_float(net, x) == static_cast<int>(c));
    }
}

TEST_CASE("all-zero weights tie-break to the lowest class index") {
    NetworkDef net = identity_net(4);
    net.weights[0] = Matrix(4, 4, 0.0);
    const std::vector<double> x{0.3, 0.9, 0.1, 0.5};
    CHECK(forward_float(net, x) == 0);
}

TEST_CASE("conv2d computes a sliding dot product with channel-minor patches") {
    NetworkDef net;
    net.input = {3, 3, 1};
    LayerDef conv;
    conv.kind = LayerDef::Kind::conv2d;
    conv.kh = conv.kw = 2;
    conv.c_in = 1;
    conv.c_out = 1;
    conv.stride = 1;
    net.layers.push_back(conv);
    net.layers.push_back({LayerDef::Kind::softmax_argmax});
    Matrix w(1, 4);
    w.at(0, 0) = 1.0;  // (ky=0,kx=0)
    w.at(0, 1) = 2.0;  // (ky=0,kx=1)
    w.at(0, 2) = 3.0;  // (ky=1,kx=0)
    w.at(0, 3) = 4.0;  // (ky=1,kx=1)
    net.weights.push_back(w);

    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9};  // row-major 3x3
    const auto scores = forward_float_scores(net, x);
    REQUIRE(scores.size() == 4);  // 2x2 output positions, 1 channel
    CHECK(scores[0] == doctest::Approx(1 * 1 + 2 * 2 + 4 * 3 + 5 * 4));
    CHECK(scores[1] == doctest::Approx(2 * 1 + 3 * 2 + 5 * 3 + 6 * 4));
    CHECK(scores[2] == doctest::Approx(4 * 1 + 5 * 2 + 7 * 3 + 8 * 4));
    CHECK(scores[3] == doctest::Approx(5 * 1 + 6 * 2 + 8 * 3 + 9 * 4));
}

TEST_CASE("mean_pool averages non-overlapping patches") {
    NetworkDef net;
    net.input = {2, 2, 1};
    LayerDef pool;
    pool.kind = LayerDef::Kind::mean_pool;
    pool.pool = 2;
    net.layers.push_back(pool);
    net.layers.push_back({LayerDef::Kind::softmax_argmax});
    const std::vector<double> x{1.0, 2.0, 3.0, 6.0};
    const auto scores = forward_float_scores(net, x);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0] == doctest::Approx(3.0));
}

TEST_CASE("shape mismatches are rejected") {
    const NetworkDef net = identity_net(5);
    const std::vector<double> bad(4, 0.0);
    CHECK_THROWS_AS(forward_float(net, bad), std::invalid_argument);
}

TEST_CASE("MXW1 containers round-trip") {
    NetworkDef net;
    net.input = {4, 4, 1};
    LayerDef conv;
    conv.kind = LayerDef::Kind::conv2d;
    conv.kh = conv.kw = 3;
    conv.c_in = 1;
    conv.c_out = 2;
    conv.stride = 1;
    net.layers.push_back(conv);
    net.layers.push_back({LayerDef::Kind::relu});
    LayerDef pool;
    pool.kind = LayerDef::Kind::mean_pool;
    pool.pool = 2;
    net.layers.push_back(pool);
    LayerDef dense;
    dense.kind = LayerDef::Kind::dense;
    dense.n_in = 2;
    dense.n_out = 3;
    net.layers.push_back(dense);
    net.layers.push_back({LayerDef::Kind::softmax_argmax});
    Matrix w1(2, 9);
    for (std::size_t i = 0; i < w1.data.size(); ++i) {
        w1.data[i] = 0.125 * static_cast<double>(i) - 0.5;  // exact in float32
    }
    Matrix w2(3, 2);
    for (std::size_t i = 0; i < w2.data.size(); ++i) {
        w2.data[i] = 0.25 * static_cast<double>(i);
    }
    net.weights = {w1, w2};

    const auto path = std::filesystem::temp_directory_path() / "srxbar_roundtrip.mxw";
    save_network_mxw(path, net);
    const NetworkDef loaded = load_network_mxw(path);
    REQUIRE(loaded.layers.size() == net.layers.size());
    CHECK(loaded.input.h == 4);
    CHECK(loaded.weights[0].data == net.weights[0].data);
    CHECK(loaded.weights[1].data == net.weights[1].data);
    std::filesystem::remove(path);
}

TEST_CASE("dataset CSV loader") {
    const auto path = std::filesystem::temp_directory_path() / "srxbar_dataset.csv";
    {
        std::ofstream out(path);
        out << "0.5,0.25,1\n0.125,0.75,0\n";
    }
    const Dataset data = load_dataset_csv(path);
    REQUIRE(data.size() == 2);
    CHECK(data.features.cols == 2);
    CHECK(data.features.at(0, 1) == 0.25);
    CHECK(data.labels[0] == 1);
    CHECK(data.labels[1] == 0);
    std::filesystem::remove(path);
}

TEST_CASE("bundled fixture network reproduces its frozen float baseline") {
    const NetworkDef net = load_network_mxw(kDataDir / "fixture_net.mxw");
    const Dataset data = load_dataset_csv(kDataDir / "digits_test.csv");
    REQUIRE(data.size() == 360);
    const double accuracy = float_accuracy_percent(net, data);
    CHECK(accuracy == doctest::Approx(96.111111).epsilon(1e-4));
}

TEST_CASE("mapped inference equals float inference on exactly representable weights") {
    const NetworkDef net = load_network_mxw(kDataDir / "fixture_net.mxw");
    const Dataset data = load_dataset_csv(kDataDir / "digits_test.csv");

    // Snap every layer's weights onto the (m=3, L=4) catalog, then compare
    // the two inference paths on a sample slice.
    NetworkDef snapped = net;
    {
        MappedNetwork probe(net, 3, 4, NodeTopology::parallel, log_device());
        for (std::size_t p = 0; p < snapped.weights.size(); ++p) {
            snapped.weights[p] = probe.realized_weights(p);
        }
    }
    MappedNetwork mapped(snapped, 3, 4, NodeTopology::parallel, log_device());
    NonIdealityConfig cfg;
    cfg.read_noise_frac = 0.0;
    mapped.realize(cfg, 0);
    for (std::size_t s = 0; s < 60; ++s) {
        const std::span<const double> row(data.features.data.data() + s * data.features.cols,
                                          data.features.cols);
        CHECK(mapped.forward_mapped(row, cfg, 0, s) == forward_float(snapped, row));
    }
}

TEST_CASE("high-resolution nodes agree with float inference almost everywhere") {
    // With quantization gaps far below the weight precision and all
    // non-idealities off, the mapped path should match float predictions
    // on at least 99% of the test set even without snapping the weights.
    const NetworkDef net = load_network_mxw(kDataDir / "fixture_net.mxw");
    const Dataset data = load_dataset_csv(kDataDir / "digits_test.csv");
    MappedNetwork mapped(net, 6, 8, NodeTopology::parallel, log_device());
    NonIdealityConfig cfg;
    cfg.read_noise_frac = 0.0;
    mapped.realize(cfg, 0);
    std::size_t agree = 0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        const std::span<const double> row(data.features.data.data() + s * data.features.cols,
                                          data.features.cols);
        if (mapped.forward_mapped(row, cfg, 0, s) == forward_float(net, row)) ++agree;
    }
    CHECK(agree >= (data.size() * 99) / 100);
}

TEST_CASE("evaluate_grid basics") {
    const NetworkDef net = load_network_mxw(kDataDir / "fixture_net.mxw");
    Dataset data = load_dataset_csv(kDataDir / "digits_test.csv");
    // a 60-sample slice keeps this unit test quick
    data.features.rows = 60;
    data.features.data.resize(60 * data.features.cols);
    data.labels.resize(60);

    const NodeGridPoint grid[] = {{1, 2}, {1, 2}};
    const double no_var[] = {0.0};
    const auto rows = evaluate_grid(net, data, grid, no_var, 1, 42, log_device());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].level_count == 2);
    CHECK(rows[0].accuracy_percent == rows[1].accuracy_percent);  // duplicate grid entries
    CHECK(rows[0].float_baseline_percent == rows[1].float_baseline_percent);
    CHECK(rows[0].trials == 1);

    const auto rerun = evaluate_grid(net, data, grid, no_var, 1, 42, log_device());
    CHECK(rerun[0].accuracy_percent == rows[0].accuracy_percent);  // seed determinism

    CHECK_THROWS_AS(evaluate_grid(net, data, {}, no_var, 1, 42, log_device()),
                    std::invalid_argument);
}
