#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "srxbar/errors.hpp"
#include "srxbar/mapper.hpp"
#include "srxbar/rng.hpp"

using namespace srxbar;

namespace {

LevelSet table_v_levels() {
    return LevelSet::from_values({10e-6, 15e-6, 29e-6, 1000e-6});
}

NodeSpec node_for(const QuantizerTable& q) {
    NodeSpec node;
    node.memristors_per_node = q.memristors_per_node();
    node.topology = q.topology();
    node.device.r_on_ohm = 1e3;
    node.device.r_off_ohm = 100e3;
    node.device.level_count = q.levels().count();
    node.device.placement = LevelPlacement::explicit_list;
    node.device.explicit_levels = q.levels().values();
    return node;
}

}  // namespace

TEST_CASE("build_quantizer reproduces the programming-sequence table") {
    const QuantizerTable q =
        build_quantizer(table_v_levels(), 3, NodeTopology::parallel, 0.0, 1.0);
    REQUIRE(q.entries().size() == 20);
    CHECK(q.combinatorial_count() == 20);
    CHECK(q.g_node_min() * 1e6 == doctest::Approx(30.0));
    CHECK(q.g_node_max() * 1e6 == doctest::Approx(3000.0));

    // the 40 uS node programs as (15, 15, 10)
    const auto& row40 = q.entries()[2];
    CHECK(row40.node_conductance * 1e6 == doctest::Approx(40.0));
    REQUIRE(row40.level_indices == std::vector<std::uint16_t>{1, 1, 0});

    // canonical device order is non-increasing by level value
    for (const auto& e : q.entries()) {
        for (std::size_t d = 1; d < e.level_indices.size(); ++d) {
            CHECK(e.level_indices[d - 1] >= e.level_indices[d]);
        }
    }
}

TEST_CASE("binary device yields the two-row table") {
    const auto levels = LevelSet::from_values({10e-6, 1000e-6});
    const QuantizerTable q = build_quantizer(levels, 1, NodeTopology::parallel, 0.0, 1.0);
    REQUIRE(q.entries().size() == 2);
    CHECK(q.entries()[0].node_conductance == 10e-6);
    CHECK(q.entries()[1].node_conductance == 1000e-6);
}

TEST_CASE("quantize mechanics on the programming-sequence table") {
    const QuantizerTable q =
        build_quantizer(table_v_levels(), 3, NodeTopology::parallel, 0.0, 1.0);

    SUBCASE("domain endpoints hit the catalog extremes") {
        CHECK(q.quantize(0.0).conductance == q.g_node_min());
        CHECK(q.quantize(1.0).conductance == q.g_node_max());
    }
    SUBCASE("an exactly representable target is returned untouched") {
        const double w40 = q.unmap(40e-6);
        CHECK(q.quantize(w40).conductance * 1e6 == doctest::Approx(40.0));
    }
    SUBCASE("nearest-neighbor picks 40 over 45 for a 41 uS target") {
        const double w41 = q.unmap(41e-6);
        CHECK(q.quantize(w41).conductance * 1e6 == doctest::Approx(40.0));
    }
    SUBCASE("ties break toward the lower conductance") {
        // integer level values make the midpoint an exact tie in doubles
        const auto levels = LevelSet::from_values({1.0, 3.0});
        const QuantizerTable q2 = build_quantizer(levels, 1, NodeTopology::parallel, 0.0, 1.0);
        CHECK(q2.quantize(0.5).conductance == 1.0);  // exactly between 1 and 3
    }
    SUBCASE("out-of-range weights clamp and flag") {
        const auto hit = q.quantize(1.75);
        CHECK(hit.clamped);
        CHECK(hit.conductance == q.g_node_max());
        const auto low = q.quantize(-0.25);
        CHECK(low.clamped);
        CHECK(low.conductance == q.g_node_min());
    }
}

TEST_CASE("quantization is idempotent and monotone; round trip is exact") {
    const QuantizerTable q =
        build_quantizer(table_v_levels(), 3, NodeTopology::parallel, 0.0, 1.0);
    rng::Substream draw(31337, {rng::Stream::generic, 0, 0, 0, 0});
    double prev_w = 0.0, prev_g = q.g_node_min();
    for (int rep = 0; rep < 500; ++rep) {
        const double w = draw.uniform01();
        const auto hit = q.quantize(w);
        const auto again = q.quantize(hit.w_realized);
        CHECK(again.entry_index == hit.entry_index);
        CHECK(again.conductance == hit.conductance);
        CHECK(q.unmap(q.map_weight(w)) == doctest::Approx(w).epsilon(1e-14));
        if (w >= prev_w) {
            CHECK(hit.conductance >= prev_g);
        }
        prev_w = w;
        prev_g = hit.conductance;
    }
}

TEST_CASE("quantization error is bounded by half the largest catalog gap") {
    const QuantizerTable q =
        build_quantizer(table_v_levels(), 3, NodeTopology::parallel, 0.0, 1.0);
    double max_gap = 0.0;
    for (std::size_t i = 1; i < q.entries().size(); ++i) {
        max_gap = std::max(max_gap, q.entries()[i].node_conductance -
                                        q.entries()[i - 1].node_conductance);
    }
    rng::Substream draw(99, {rng::Stream::generic, 1, 0, 0, 0});
    for (int rep = 0; rep < 2000; ++rep) {
        const double w = draw.uniform01();
        const auto hit = q.quantize(w);
        CHECK(std::abs(q.map_weight(w) - hit.conductance) <= 0.5 * max_gap * (1 + 1e-12));
    }
}

TEST_CASE("a larger node quantizes the same weights more accurately") {
    const auto levels = derive_levels([] {
        DeviceSpec d;
        d.r_on_ohm = 1e3;
        d.r_off_ohm = 100e3;
        d.level_count = 4;
        d.placement = LevelPlacement::log_in_conductance;
        return d;
    }());
    const QuantizerTable q1 = build_quantizer(levels, 1, NodeTopology::parallel, 0.0, 1.0);
    const QuantizerTable q3 = build_quantizer(levels, 3, NodeTopology::parallel, 0.0, 1.0);
    rng::Substream draw(2024, {rng::Stream::generic, 2, 0, 0, 0});
    double err1 = 0.0, err3 = 0.0;
    for (int rep = 0; rep < 2000; ++rep) {
        const double w = draw.uniform01();
        err1 += std::abs(q1.quantize(w).w_realized - w);
        err3 += std::abs(q3.quantize(w).w_realized - w);
    }
    CHECK(err3 < err1);
}

TEST_CASE("series and 3D topology catalogs") {
    const auto levels = LevelSet::from_values({10e-6, 1000e-6});
    SUBCASE("two binary devices in series") {
        const QuantizerTable q = build_quantizer(levels, 2, NodeTopology::series, 0.0, 1.0);
        REQUIRE(q.entries().size() == 3);
        CHECK(q.entries()[0].node_conductance == doctest::Approx(5e-6));
        CHECK(q.entries()[1].node_conductance ==
              doctest::Approx(1.0 / (1.0 / 10e-6 + 1.0 / 1000e-6)));
        CHECK(q.entries()[2].node_conductance == doctest::Approx(500e-6));
    }
    SUBCASE("3D node: one branch of two stacked binary devices") {
        const QuantizerTable q =
            build_quantizer(levels, 1, NodeTopology::three_d_two_layer, 0.0, 1.0);
        REQUIRE(q.entries().size() == 3);  // (l,l), (h,l), (h,h)
        CHECK(q.entries()[0].node_conductance == doctest::Approx(5e-6));
        CHECK(q.entries()[2].node_conductance == doctest::Approx(500e-6));
        for (const auto& e : q.entries()) {
            CHECK(e.level_indices.size() == 2);
        }
    }
}

TEST_CASE("degenerate windows and bad domains are rejected") {
    const auto flat = LevelSet::from_values({42e-6});
    CHECK_THROWS_AS(build_quantizer(flat, 1, NodeTopology::parallel, 0.0, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(build_quantizer(table_v_levels(), 3, NodeTopology::parallel, 1.0, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(build_quantizer(table_v_levels(), 0, NodeTopology::parallel, 0.0, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(build_quantizer(table_v_levels(), 12, NodeTopology::parallel, 0.0, 1.0, 1e-9, 100),
                    enumeration_limit_error);
}

TEST_CASE("quantize_weight decodes the assignment") {
    const QuantizerTable q =
        build_quantizer(table_v_levels(), 3, NodeTopology::parallel, 0.0, 1.0);
    const auto qw = quantize_weight(q, q.unmap(40e-6));
    CHECK(qw.conductance * 1e6 == doctest::Approx(40.0));
    CHECK(qw.assignment.level_indices == std::vector<std::uint16_t>{1, 1, 0});
    CHECK(qw.assignment.sum_conductance == qw.conductance);
    CHECK_FALSE(qw.clamped);
}

TEST_CASE("map_matrix") {
    const QuantizerTable q =
        build_quantizer(table_v_levels(), 3, NodeTopology::parallel, 0.0, 1.0);
    const NodeSpec node = node_for(q);

    SUBCASE("zero matrix, signed mapping: both columns at the floor, zero difference") {
        Matrix w(2, 2, 0.0);
        const MappedMatrix mapped = map_matrix(w, q, node, true);
        CHECK(mapped.crossbar.cols() == 4);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                CHECK(mapped.crossbar.node_conductance(i, j) == q.g_node_min());
                CHECK(mapped.reference.at(i, j) == q.g_node_min());
            }
        }
        NonIdealityConfig cfg;
        cfg.read_noise_frac = 0.0;
        ReadOptions opts;
        opts.reference = &mapped.reference;
        const std::vector<double> v{0.4, 0.8};
        const ReadResult rr = noisy_read(mapped.crossbar, v, cfg, 0, opts);
        const auto diff = signed_read_interleaved(rr);
        CHECK(diff[0] == 0.0);
        CHECK(diff[1] == 0.0);
    }

    SUBCASE("the maximal weight programs the top entry (unsigned)") {
        Matrix w(1, 1);
        w.at(0, 0) = 1.0;
        const MappedMatrix mapped = map_matrix(w, q, node, false);
        CHECK(mapped.crossbar.node_conductance(0, 0) == q.g_node_max());
    }

    SUBCASE("a negative weight reads as a negative signed current") {
        Matrix w(1, 1);
        w.at(0, 0) = -0.6;
        const MappedMatrix mapped = map_matrix(w, q, node, true);
        NonIdealityConfig cfg;
        cfg.read_noise_frac = 0.0;
        ReadOptions opts;
        opts.reference = &mapped.reference;
        const std::vector<double> v{1.0};
        const ReadResult rr = noisy_read(mapped.crossbar, v, cfg, 0, opts);
        const auto diff = signed_read_interleaved(rr);
        CHECK(diff[0] < 0.0);
    }

    SUBCASE("sign correctness across random weights above one step") {
        rng::Substream draw(8, {rng::Stream::generic, 3, 0, 0, 0});
        Matrix w(1, 8);
        for (std::size_t j = 0; j < 8; ++j) {
            w.at(0, j) = (draw.uniform01() - 0.5);
        }
        const MappedMatrix mapped = map_matrix(w, q, node, true);
        NonIdealityConfig cfg;
        cfg.read_noise_frac = 0.0;
        ReadOptions opts;
        opts.reference = &mapped.reference;
        const std::vector<double> v{1.0};
        const ReadResult rr = noisy_read(mapped.crossbar, v, cfg, 0, opts);
        const auto diff = signed_read_interleaved(rr);
        const double step = (q.g_node_max() - q.g_node_min()) /
                            static_cast<double>(q.entries().size());
        for (std::size_t j = 0; j < 8; ++j) {
            if (std::abs(q.map_weight(std::abs(w.at(0, j))) - q.g_node_min()) > step) {
                CHECK(std::signbit(diff[j]) == std::signbit(w.at(0, j)));
            }
        }
    }

    SUBCASE("out-of-range weights count clamps") {
        Matrix w(1, 2);
        w.at(0, 0) = 2.5;
        w.at(0, 1) = 0.5;
        const MappedMatrix mapped = map_matrix(w, q, node, true);
        CHECK(mapped.clamp_count == 1);
    }

    SUBCASE("non-finite weights are rejected") {
        Matrix w(1, 1);
        w.at(0, 0) = std::nan("");
        CHECK_THROWS_AS(map_matrix(w, q, node, true), std::domain_error);
    }
}

TEST_CASE("3D nodes map and read end to end") {
    const auto levels = LevelSet::from_values({10e-6, 1000e-6});
    const QuantizerTable q =
        build_quantizer(levels, 2, NodeTopology::three_d_two_layer, 0.0, 1.0);
    NodeSpec node;
    node.memristors_per_node = 2;  // two branches, four devices
    node.topology = NodeTopology::three_d_two_layer;
    node.device.r_on_ohm = 1e3;
    node.device.r_off_ohm = 100e3;
    node.device.level_count = 2;

    Matrix w(1, 1);
    w.at(0, 0) = 1.0;
    const MappedMatrix mapped = map_matrix(w, q, node, /*signed_mapping=*/false);
    CHECK(mapped.crossbar.realized_devices(0, 0).size() == 4);
    // maximal weight: both branches at (g_h series g_h) = g_h/2 each
    CHECK(mapped.crossbar.node_conductance(0, 0) == doctest::Approx(1000e-6));

    NonIdealityConfig cfg;
    cfg.read_noise_frac = 0.0;
    const std::vector<double> v{0.5};
    ReadOptions opts;
    opts.reference = &mapped.reference;
    const ReadResult rr = noisy_read(mapped.crossbar, v, cfg, 0, opts);
    CHECK(rr.currents[0] == doctest::Approx(0.5 * 1000e-6));
    CHECK(rr.rce_percent[0] == doctest::Approx(0.0));
}

TEST_CASE("mapping CSV dump carries the audit columns") {
    const QuantizerTable q =
        build_quantizer(table_v_levels(), 3, NodeTopology::parallel, 0.0, 1.0);
    std::ostringstream os;
    write_mapping_csv(os, q);
    const std::string text = os.str();
    CHECK(text.rfind("g_1,g_2,g_3,g_n,w_realized\n", 0) == 0);
    CHECK(text.find("\n10,10,10,30,0\n") != std::string::npos);
    CHECK(text.find("\n15,15,10,40,") != std::string::npos);
    CHECK(text.find("\n1000,1000,1000,3000,1\n") != std::string::npos);
}
