#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "srxbar/crossbar.hpp"
#include "srxbar/net.hpp"

namespace srxbar {

enum class ExperimentKind { levels, rce, ratio, aging, noise, wire, nn, mapdump };

/// Parsed experiment configuration. File format: line-oriented sections
/// ([section] headers, key = value pairs, '#' comments, UTF-8). The full
/// schema is documented in the README and the bundled configs/ examples.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::rce;

    unsigned rows = 10;
    unsigned cols = 10;

    DeviceSpec device;  // level_count is used by mapdump; sweeps use L_list
    NodeTopology topology = NodeTopology::parallel;
    unsigned node_m = 3;  // mapdump node size

    std::vector<unsigned> m_list{1, 2, 3, 4, 5, 6};
    std::vector<unsigned> L_list{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<NodeGridPoint> nn_grid;  // nn experiment uses (m, L) pairs

    NonIdealityConfig nonideal;
    double w_min = -1.0;
    double w_max = 1.0;

    unsigned trials = 0;  // 0 = per-kind default (100; 30 for nn)
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out_path = "-";

    std::vector<double> ratio_list{5, 10, 20, 40, 60, 80, 100};
    std::vector<double> aging_ratio_list{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    std::vector<double> noise_variance_list{0.0, 1e-4, 2.5e-4, 5e-4, 1e-3};
    std::vector<double> variability_list{0.0};

    std::string nn_weights_path;
    std::string nn_dataset_path;

    unsigned effective_trials() const {
        if (trials != 0) return trials;
        return kind == ExperimentKind::nn ? 30 : 100;
    }
};

/// Parse config text; source_name appears in diagnostics.
/// Throws config_error with line/field information.
ExperimentConfig parse_config_text(std::string_view text, std::string_view source_name);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Canonical serialized form of the effective config (after overrides);
/// hashed into every CSV header so outputs are traceable to their inputs.
std::string canonical_config_text(const ExperimentConfig& cfg);

std::string_view to_string(ExperimentKind kind);

}  // namespace srxbar
