#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "srxbar/crossbar.hpp"
#include "srxbar/levels.hpp"
#include "srxbar/matrix.hpp"

// Translate real-valued weights into node-level programming assignments:
// an affine weight-to-conductance map anchored at the catalog extremes,
// nearest-neighbor lookup over the achievable node conductances, and
// signed mapping onto differential column pairs.

namespace srxbar {

/// One achievable node conductance and the per-device level assignment
/// that realizes it (level indices sorted non-increasing by value).
struct QuantizerEntry {
    double node_conductance = 0.0;
    std::vector<std::uint16_t> level_indices;
};

class QuantizerTable {
public:
    struct Quantized {
        double conductance = 0.0;
        std::size_t entry_index = 0;
        double w_realized = 0.0;
        bool clamped = false;
    };

    double w_min() const { return w_min_; }
    double w_max() const { return w_max_; }
    const LevelSet& levels() const { return levels_; }
    double g_node_min() const { return entries_.front().node_conductance; }
    double g_node_max() const { return entries_.back().node_conductance; }
    double g_span() const { return g_node_max() - g_node_min(); }

    const std::vector<QuantizerEntry>& entries() const { return entries_; }
    std::uint64_t combinatorial_count() const { return combinatorial_count_; }
    std::uint64_t effective_count() const { return effective_count_; }
    unsigned memristors_per_node() const { return m_; }
    NodeTopology topology() const { return topology_; }

    /// Affine map w -> g with map(w_min) = g_node_min, map(w_max) = g_node_max.
    double map_weight(double w) const {
        return g_node_min() + (w - w_min_) * scale_;
    }
    /// Inverse affine map g -> w.
    double unmap(double g) const {
        return w_min_ + (g - g_node_min()) / scale_;
    }

    /// Nearest achievable conductance to map(w); ties take the lower
    /// conductance. Out-of-range weights clamp to the endpoint and flag it.
    Quantized quantize(double w) const;

private:
    friend QuantizerTable build_quantizer(const LevelSet&, unsigned, NodeTopology,
                                          double, double, double, std::uint64_t);
    LevelSet levels_;
    std::vector<QuantizerEntry> entries_;
    std::uint64_t combinatorial_count_ = 0;
    std::uint64_t effective_count_ = 0;
    double epsilon_ = 0.0;
    double w_min_ = 0.0, w_max_ = 1.0;
    double scale_ = 0.0;  // g per unit weight
    unsigned m_ = 1;
    NodeTopology topology_ = NodeTopology::parallel;
};

/// Enumerate the achievable node conductances for (levels, m, topology) and
/// fix the affine weight map on [w_min, w_max].
/// Throws enumeration_limit_error past the cap and std::domain_error on a
/// degenerate window or w_min >= w_max.
QuantizerTable build_quantizer(const LevelSet& levels, unsigned m, NodeTopology topology,
                               double w_min, double w_max,
                               double epsilon = kDefaultEffectiveEpsilon,
                               std::uint64_t cap = kDefaultEnumerationCap);

/// A weight matrix mapped onto a crossbar plus the infinite-resolution
/// reference conductances used as the RCE baseline.
struct MappedMatrix {
    ProgrammedCrossbar crossbar;
    Matrix reference;            // same shape as the crossbar
    std::size_t clamp_count = 0; // weights that fell outside [w_min, w_max]
    bool signed_mapping = false;
};

/// Program a crossbar from an n x k weight matrix.
///
/// Unsigned: one physical column per logical column; node (i, j) takes the
/// nearest catalog entry to map(w_ij); the quantizer domain must cover the
/// weights' range.
///
/// Signed: two physical columns per logical column, interleaved as
/// (2j, 2j+1) = (positive, negative). The quantizer is built on the
/// magnitude domain (w_min = 0), the active column takes map(|w|)-nearest
/// and the inactive column sits at the g_node_min floor, so
/// i+ - i- = (g(|w|) - g_min) * sign(w) and a zero weight cancels exactly.
///
/// The node spec must agree with the quantizer's (m, topology); it supplies
/// the device window needed to realize drifted levels.
MappedMatrix map_matrix(const Matrix& weights, const QuantizerTable& q, const NodeSpec& node,
                        bool signed_mapping);

/// Quantize w and decode the chosen entry: realized conductance, realized
/// weight, and the per-device level assignment.
struct QuantizedWeight {
    double conductance = 0.0;
    double w_realized = 0.0;
    NodeLevelMultiset assignment;
    bool clamped = false;
};
QuantizedWeight quantize_weight(const QuantizerTable& q, double w);

/// Audit dump of the full mapping table as CSV rows
/// g_1..g_m, g_n, w_realized (conductances in microsiemens).
void write_mapping_csv(std::ostream& os, const QuantizerTable& q);

}  // namespace srxbar
