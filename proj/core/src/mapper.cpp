#include "srxbar/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "srxbar/csv.hpp"
#include "srxbar/errors.hpp"

namespace srxbar {

namespace {

double series_pair(double g1, double g2) {
    return 1.0 / (1.0 / g1 + 1.0 / g2);
}

/// Enumerate size-m multisets over `base` values, carrying an index list
/// per entry. Generic over the value combiner.
template <typename Combine>
std::vector<QuantizerEntry> enumerate_multisets(const std::vector<double>& base, unsigned m,
                                                Combine&& combine) {
    std::vector<QuantizerEntry> entries;
    const auto B = static_cast<std::uint16_t>(base.size());
    std::vector<std::uint16_t> idx(m, static_cast<std::uint16_t>(B - 1));
    for (;;) {
        entries.push_back({combine(idx), idx});
        std::size_t pos = m;
        while (pos > 0 && idx[pos - 1] == 0) --pos;
        if (pos == 0) break;
        const std::uint16_t next = static_cast<std::uint16_t>(idx[pos - 1] - 1);
        for (std::size_t p = pos - 1; p < m; ++p) idx[p] = next;
    }
    return entries;
}

}  // namespace

QuantizerTable build_quantizer(const LevelSet& levels, unsigned m, NodeTopology topology,
                               double w_min, double w_max, double epsilon,
                               std::uint64_t cap) {
    if (m == 0) throw std::domain_error("build_quantizer: m must be >= 1");
    if (!(w_min < w_max)) throw std::domain_error("build_quantizer: requires w_min < w_max");

    QuantizerTable q;
    q.levels_ = levels;
    q.m_ = m;
    q.topology_ = topology;
    q.w_min_ = w_min;
    q.w_max_ = w_max;
    q.epsilon_ = epsilon;

    const unsigned L = levels.count();
    switch (topology) {
        case NodeTopology::parallel: {
            LevelCatalog catalog = enumerate_node_levels(levels, m, epsilon, cap);
            q.combinatorial_count_ = catalog.combinatorial_count;
            q.entries_.reserve(catalog.entries.size());
            for (auto& e : catalog.entries) {
                q.entries_.push_back({e.sum_conductance, std::move(e.level_indices)});
            }
            break;
        }
        case NodeTopology::series: {
            const std::uint64_t total = multiset_count_capped(L, m, cap);
            if (total > cap) {
                throw enumeration_limit_error(
                    "build_quantizer: combination count exceeds the enumeration cap of " +
                    std::to_string(cap));
            }
            q.combinatorial_count_ = total;
            q.entries_ = enumerate_multisets(
                levels.values(), m, [&](const std::vector<std::uint16_t>& idx) {
                    double inv = 0.0;
                    for (const auto i : idx) inv += 1.0 / levels[i];
                    return 1.0 / inv;
                });
            break;
        }
        case NodeTopology::three_d_two_layer: {
            // Branch values: unordered device pairs in series across the
            // two layers. A node is a multiset of m branches.
            std::vector<double> branch_values;
            std::vector<std::pair<std::uint16_t, std::uint16_t>> branch_pairs;
            for (std::uint16_t a = 0; a < L; ++a) {
                for (std::uint16_t b = 0; b <= a; ++b) {
                    branch_values.push_back(series_pair(levels[a], levels[b]));
                    branch_pairs.emplace_back(a, b);  // (layer 1, layer 2)
                }
            }
            const std::uint64_t total =
                multiset_count_capped(branch_values.size(), m, cap);
            if (total > cap) {
                throw enumeration_limit_error(
                    "build_quantizer: combination count exceeds the enumeration cap of " +
                    std::to_string(cap));
            }
            q.combinatorial_count_ = total;
            auto raw = enumerate_multisets(
                branch_values, m, [&](const std::vector<std::uint16_t>& idx) {
                    double sum = 0.0;
                    for (const auto i : idx) sum += branch_values[i];
                    return sum;
                });
            // Expand branch indices into device-level indices:
            // layer-1 devices first, then layer-2 devices.
            q.entries_.reserve(raw.size());
            for (auto& e : raw) {
                QuantizerEntry expanded;
                expanded.node_conductance = e.node_conductance;
                expanded.level_indices.reserve(2 * m);
                for (const auto bi : e.level_indices) {
                    expanded.level_indices.push_back(branch_pairs[bi].first);
                }
                for (const auto bi : e.level_indices) {
                    expanded.level_indices.push_back(branch_pairs[bi].second);
                }
                q.entries_.push_back(std::move(expanded));
            }
            break;
        }
    }

    std::stable_sort(q.entries_.begin(), q.entries_.end(),
                     [](const QuantizerEntry& a, const QuantizerEntry& b) {
                         if (a.node_conductance != b.node_conductance) {
                             return a.node_conductance < b.node_conductance;
                         }
                         return a.level_indices < b.level_indices;
                     });

    std::uint64_t effective = 0;
    double last_kept = 0.0;
    for (const auto& e : q.entries_) {
        if (effective == 0 || e.node_conductance - last_kept > epsilon) {
            ++effective;
            last_kept = e.node_conductance;
        }
    }
    q.effective_count_ = effective;

    const double span = q.g_node_max() - q.g_node_min();
    if (!(span > 0.0)) {
        throw std::domain_error("build_quantizer: degenerate conductance window");
    }
    q.scale_ = span / (w_max - w_min);
    return q;
}

QuantizerTable::Quantized QuantizerTable::quantize(double w) const {
    Quantized out;
    double w_clamped = w;
    if (w < w_min_) {
        w_clamped = w_min_;
        out.clamped = true;
    } else if (w > w_max_) {
        w_clamped = w_max_;
        out.clamped = true;
    }
    const double g_target = map_weight(w_clamped);

    const auto it = std::lower_bound(
        entries_.begin(), entries_.end(), g_target,
        [](const QuantizerEntry& e, double g) { return e.node_conductance < g; });
    std::size_t hi = static_cast<std::size_t>(it - entries_.begin());
    std::size_t lo = hi > 0 ? hi - 1 : 0;
    if (hi >= entries_.size()) hi = entries_.size() - 1;
    // Nearest entry; exact ties take the lower conductance.
    const double d_lo = g_target - entries_[lo].node_conductance;
    const double d_hi = entries_[hi].node_conductance - g_target;
    out.entry_index = (d_lo <= d_hi) ? lo : hi;
    out.conductance = entries_[out.entry_index].node_conductance;
    out.w_realized = unmap(out.conductance);
    return out;
}

QuantizedWeight quantize_weight(const QuantizerTable& q, double w) {
    const auto hit = q.quantize(w);
    QuantizedWeight out;
    out.conductance = hit.conductance;
    out.w_realized = hit.w_realized;
    out.clamped = hit.clamped;
    out.assignment.level_indices = q.entries()[hit.entry_index].level_indices;
    out.assignment.sum_conductance = hit.conductance;
    return out;
}

MappedMatrix map_matrix(const Matrix& weights, const QuantizerTable& q, const NodeSpec& node,
                        bool signed_mapping) {
    if (node.memristors_per_node != q.memristors_per_node() ||
        node.topology != q.topology()) {
        throw std::invalid_argument("map_matrix: node spec does not match the quantizer");
    }
    for (const double w : weights.data) {
        if (!std::isfinite(w)) {
            throw std::domain_error("map_matrix: weights must be finite");
        }
    }
    const std::size_t n = weights.rows;
    const std::size_t k = weights.cols;
    const std::size_t phys_cols = signed_mapping ? 2 * k : k;

    MappedMatrix out{ProgrammedCrossbar(n, phys_cols, node), Matrix(n, phys_cols), 0,
                     signed_mapping};
    const auto& floor_entry = q.entries().front();
    const double g_floor = floor_entry.node_conductance;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double w = weights.at(i, j);
            if (!signed_mapping) {
                const auto hit = q.quantize(w);
                if (hit.clamped) ++out.clamp_count;
                out.crossbar.assign(i, j, q.entries()[hit.entry_index].level_indices);
                out.reference.at(i, j) = q.map_weight(std::clamp(w, q.w_min(), q.w_max()));
                continue;
            }
            const auto hit = q.quantize(std::abs(w));
            if (hit.clamped) ++out.clamp_count;
            const auto& active = q.entries()[hit.entry_index].level_indices;
            const std::size_t pos = 2 * j, neg = 2 * j + 1;
            const double g_ref =
                q.map_weight(std::clamp(std::abs(w), q.w_min(), q.w_max()));
            if (w >= 0.0) {
                out.crossbar.assign(i, pos, active);
                out.crossbar.assign(i, neg, floor_entry.level_indices);
                out.reference.at(i, pos) = g_ref;
                out.reference.at(i, neg) = g_floor;
            } else {
                out.crossbar.assign(i, pos, floor_entry.level_indices);
                out.crossbar.assign(i, neg, active);
                out.reference.at(i, pos) = g_floor;
                out.reference.at(i, neg) = g_ref;
            }
        }
    }
    // A cleanly programmed crossbar realizes its nominal targets.
    NonIdealityConfig clean;
    clean.read_noise_frac = 0.0;
    out.crossbar.realize(clean, 0);
    return out;
}

void write_mapping_csv(std::ostream& os, const QuantizerTable& q) {
    const unsigned devices = q.topology() == NodeTopology::three_d_two_layer
                                 ? 2 * q.memristors_per_node()
                                 : q.memristors_per_node();
    for (unsigned d = 1; d <= devices; ++d) {
        os << "g_" << d << ",";
    }
    os << "g_n,w_realized\n";
    const auto& levels = q.levels();
    for (const auto& e : q.entries()) {
        for (const auto idx : e.level_indices) {
            os << format_microsiemens(levels[idx]) << ",";
        }
        os << format_microsiemens(e.node_conductance) << ","
           << format_double(q.unmap(e.node_conductance)) << "\n";
    }
}

}  // namespace srxbar
