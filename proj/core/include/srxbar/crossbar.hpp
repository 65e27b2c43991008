#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srxbar/device.hpp"
#include "srxbar/levels.hpp"
#include "srxbar/matrix.hpp"

// Analog MAC over a grid of super-resolution nodes with injectable
// non-idealities.
//
// Error accounting splits device-side from sensing-side effects.
// Device-side effects (quantization, conductance variability, boundary
// drift, wire resistance, aging, read instability) perturb only the real
// read. Sensing noise applies identically to the real read and to the
// infinite-resolution reference read: both currents pass through the same
// sense amplifier, so the relative-current-error metric isolates
// resolution and device error rather than bottoming out at the
// sensing-noise floor.

namespace srxbar {

enum class NodeTopology {
    parallel,            // m devices in parallel: g = sum(g_d)
    series,              // m devices in series: g = 1 / sum(1/g_d)
    three_d_two_layer,   // m branches of two stacked devices in series
};

struct NodeSpec {
    unsigned memristors_per_node = 1;  // m (branch count for 3D nodes)
    NodeTopology topology = NodeTopology::parallel;
    DeviceSpec device;

    /// Physical devices per node: m, or 2m for the two-layer 3D node.
    unsigned device_count() const {
        return topology == NodeTopology::three_d_two_layer ? 2 * memristors_per_node
                                                           : memristors_per_node;
    }
};

/// Seeded specification of every injectable non-ideality.
struct NonIdealityConfig {
    double read_noise_frac = 0.10;        // sensing noise, common-mode in RCE
    double conductance_var_frac = 0.0;    // program-time variability
    bool wire_enabled = false;
    double wire_res_mean_ohm = 2.5;
    double wire_res_std_ohm = 0.25;
    double boundary_drift_frac = 0.0;     // R_ON/R_OFF window drift per device
    double read_instability_frac = 0.0;   // per-column multiplicative
    double input_noise_variance = 0.0;    // volts^2, additive on inputs
    std::optional<AgingState> aging;      // applied to the device window upstream
    std::uint64_t master_seed = 0;
};

/// An n x k grid of programmed nodes. Node specs are per row so that
/// mixed-m layouts (different row groups merged into nodes of different
/// size) stay representable; uniform grids repeat one spec.
class ProgrammedCrossbar {
public:
    ProgrammedCrossbar(std::size_t rows, std::size_t cols, const NodeSpec& uniform_spec);
    ProgrammedCrossbar(std::size_t rows, std::size_t cols, std::vector<NodeSpec> row_specs);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const NodeSpec& row_spec(std::size_t i) const { return row_specs_[i]; }
    const LevelSet& row_levels(std::size_t i) const { return row_levels_[i]; }

    /// Level-index assignment for one cell (device_count entries).
    void assign(std::size_t i, std::size_t j, std::vector<std::uint16_t> level_indices);
    const std::vector<std::uint16_t>& assignment(std::size_t i, std::size_t j) const {
        return assignments_[i * cols_ + j];
    }

    /// Realized (post drift/variability) conductance of each device.
    const std::vector<double>& realized_devices(std::size_t i, std::size_t j) const {
        return realized_[i * cols_ + j];
    }
    /// Effective node conductance of the realized cell, no wire resistance.
    double node_conductance(std::size_t i, std::size_t j) const {
        return node_g_[i * cols_ + j];
    }

    /// Tag mixed into program-time stream keys (layer index in a mapped
    /// network); keeps independent layers on independent substreams.
    void set_stream_tag(std::uint32_t tag) { stream_tag_ = tag; }
    std::uint32_t stream_tag() const { return stream_tag_; }

    /// Draw realized conductances from the assignments: boundary drift
    /// first (per-device window shift, levels re-derived), then conductance
    /// variability. Deterministic in (cfg.master_seed, trial).
    void realize(const NonIdealityConfig& cfg, std::uint64_t trial);

private:
    std::size_t rows_, cols_;
    std::vector<NodeSpec> row_specs_;
    std::vector<LevelSet> row_levels_;
    std::vector<std::vector<std::uint16_t>> assignments_;
    std::vector<std::vector<double>> realized_;
    std::vector<double> node_g_;
    std::uint32_t stream_tag_ = 0;

    friend struct ReadAccess;
};

struct ReadResult {
    std::vector<double> currents;        // amps, per physical column
    std::vector<double> ideal_currents;  // reference through the same sensing chain
    std::vector<double> rce_percent;     // NaN where the ideal current is ~0
    std::size_t undefined_rce_count = 0;
};

/// Combine realized device conductances into one node conductance.
/// wire_series_ohm, when non-empty, gives a per-device series resistance.
/// Throws std::domain_error on a zero-conductance series path.
double effective_node_conductance(std::span<const double> device_conductances,
                                  NodeTopology topology,
                                  std::span<const double> wire_series_ohm = {});

/// Clean VMM against an explicit node-conductance matrix (n x k).
std::vector<double> ideal_vmm(const Matrix& node_conductance, std::span<const double> v);

/// Clean VMM against the realized crossbar (no wire, no noise).
std::vector<double> ideal_vmm(const ProgrammedCrossbar& xbar, std::span<const double> v);

/// Options for a noisy read. The reference matrix (infinite-resolution node
/// conductances, same shape as the crossbar) is supplied by the caller;
/// see map_matrix. reference_shares_input_noise feeds the reference the
/// same noisy input as the real read (the input-noise experiment).
struct ReadOptions {
    const Matrix* reference = nullptr;
    bool reference_shares_input_noise = false;
    std::uint64_t row_offset = 0;  // global row index of row 0 (tiling)
    std::uint64_t read_tag = 0;    // distinguishes repeated reads (one per
                                   // sample/patch in mapped inference)
};

/// Full non-ideal read. Application order: input noise -> wire resistance
/// -> currents -> read instability -> sensing noise (common-mode).
ReadResult noisy_read(const ProgrammedCrossbar& xbar, std::span<const double> v,
                      const NonIdealityConfig& cfg, std::uint64_t trial,
                      const ReadOptions& opts);

/// Read a vertical stack of tiles sharing k columns; the input vector is
/// split across tiles by row count. Per-device and per-row effects apply
/// inside each tile (keyed by global row); column-level sensing effects
/// apply once at the summed output, which is where the summing amplifier
/// sits. With all non-idealities disabled the result is bit-identical to
/// reading the vertically stacked crossbar in one piece.
ReadResult tile_and_sum(std::span<const ProgrammedCrossbar*> tiles,
                        std::span<const Matrix*> references,
                        std::span<const double> v_full,
                        const NonIdealityConfig& cfg, std::uint64_t trial,
                        bool reference_shares_input_noise = false);

/// Differential column pairs: result[p] = currents[pos[p]] - currents[neg[p]].
/// Throws std::invalid_argument on overlapping pairs.
std::vector<double> signed_read(std::span<const std::size_t> pos_cols,
                                std::span<const std::size_t> neg_cols,
                                const ReadResult& read);

/// signed_read for the interleaved layout map_matrix emits: pairs (2p, 2p+1).
std::vector<double> signed_read_interleaved(const ReadResult& read);

}  // namespace srxbar
