#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "srxbar/crossbar.hpp"
#include "srxbar/mapper.hpp"
#include "srxbar/matrix.hpp"

// Desk-scale inference harness: run a small pre-trained feed-forward
// network either in plain floating point or with every parametric layer
// mapped through super-resolution crossbars (signed differential columns),
// and measure the classification-accuracy cost of a node configuration.

namespace srxbar {

struct TensorShape {
    unsigned h = 1, w = 1, c = 1;
    unsigned size() const { return h * w * c; }
};

struct LayerDef {
    enum class Kind { dense, conv2d, relu, mean_pool, softmax_argmax };
    Kind kind{};
    // dense
    unsigned n_in = 0, n_out = 0;
    // conv2d (valid padding)
    unsigned kh = 0, kw = 0, c_in = 0, c_out = 0, stride = 1;
    // mean_pool (non-overlapping)
    unsigned pool = 0;
};

/// Layer list plus one weight matrix per parametric layer.
/// Dense weights are (n_out x n_in); conv weights are (c_out x kh*kw*c_in)
/// with patch elements ordered row-major and channel-minor: (ky, kx, c).
/// Activations use the same (y, x, c) layout, so flattening is implicit.
struct NetworkDef {
    TensorShape input;
    std::vector<LayerDef> layers;
    std::vector<Matrix> weights;
};

/// MXW1 container: "MXW1" magic, ASCII header (input shape + layer list),
/// then row-major little-endian float32 payloads per parametric layer.
NetworkDef load_network_mxw(const std::filesystem::path& path);
void save_network_mxw(const std::filesystem::path& path, const NetworkDef& net);

/// CSV dataset: one sample per row, feature values then an integer label.
struct Dataset {
    Matrix features;          // samples x feature_count
    std::vector<int> labels;
    std::size_t size() const { return labels.size(); }
};
Dataset load_dataset_csv(const std::filesystem::path& path);

/// Reference float inference. Argmax ties resolve to the lowest index.
int forward_float(const NetworkDef& net, std::span<const double> input);
std::vector<double> forward_float_scores(const NetworkDef& net, std::span<const double> input);
double float_accuracy_percent(const NetworkDef& net, const Dataset& data);

/// One node configuration of the evaluation grid.
struct NodeGridPoint {
    unsigned m = 1;
    unsigned L = 2;
};

/// A network whose parametric layers are programmed onto crossbars.
class MappedNetwork {
public:
    MappedNetwork(const NetworkDef& net, unsigned m, unsigned L,
                  NodeTopology topology, const DeviceSpec& device_template);

    /// Draw realized conductances for every layer, then run one sample.
    /// Reads are deterministic in (cfg.master_seed, trial, sample_tag).
    void realize(const NonIdealityConfig& cfg, std::uint64_t trial);
    int forward_mapped(std::span<const double> input, const NonIdealityConfig& cfg,
                       std::uint64_t trial, std::uint64_t sample_tag) const;

    const NetworkDef& network() const { return *net_; }
    const QuantizerTable& layer_quantizer(std::size_t parametric_index) const {
        return quantizers_[parametric_index];
    }
    /// Weights the crossbars actually realize (quantized, before noise).
    Matrix realized_weights(std::size_t parametric_index) const;

private:
    const NetworkDef* net_;
    LevelSet levels_;
    std::vector<QuantizerTable> quantizers_;   // per parametric layer
    std::vector<MappedMatrix> mapped_;         // crossbar is n_in x 2*n_out
    std::vector<double> dequant_scale_;        // w_absmax / g_span per layer
};

struct EvalRow {
    unsigned m = 0, L = 0;
    std::uint64_t level_count = 0;  // L_C
    double variability_frac = 0.0;
    double accuracy_percent = 0.0;
    double float_baseline_percent = 0.0;
    unsigned trials = 1;
};

/// Full cross product of grid points and variability fractions; accuracy is
/// the mean over `trials` independent programming realizations.
std::vector<EvalRow> evaluate_grid(const NetworkDef& net, const Dataset& data,
                                   std::span<const NodeGridPoint> grid,
                                   std::span<const double> variability_fracs,
                                   unsigned trials, std::uint64_t seed,
                                   const DeviceSpec& device_template,
                                   NodeTopology topology = NodeTopology::parallel);

}  // namespace srxbar
