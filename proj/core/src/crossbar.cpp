#include "srxbar/crossbar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srxbar/rng.hpp"

namespace srxbar {

namespace {

constexpr double kUndefinedCurrentFloor = 1e-12;  // amps; below this RCE is undefined

std::uint64_t pack_tag_device(std::uint32_t tag, unsigned device) {
    return (static_cast<std::uint64_t>(tag) << 32) | device;
}

}  // namespace

ProgrammedCrossbar::ProgrammedCrossbar(std::size_t rows, std::size_t cols,
                                       const NodeSpec& uniform_spec)
    : ProgrammedCrossbar(rows, cols, std::vector<NodeSpec>(rows, uniform_spec)) {}

ProgrammedCrossbar::ProgrammedCrossbar(std::size_t rows, std::size_t cols,
                                       std::vector<NodeSpec> row_specs)
    : rows_(rows), cols_(cols), row_specs_(std::move(row_specs)) {
    if (rows_ == 0 || cols_ == 0) {
        throw std::domain_error("ProgrammedCrossbar: rows and cols must be >= 1");
    }
    if (row_specs_.size() != rows_) {
        throw std::invalid_argument("ProgrammedCrossbar: one NodeSpec per row required");
    }
    row_levels_.reserve(rows_);
    for (const auto& spec : row_specs_) {
        row_levels_.push_back(derive_levels(spec.device));
    }
    assignments_.resize(rows_ * cols_);
    realized_.resize(rows_ * cols_);
    node_g_.assign(rows_ * cols_, 0.0);
}

void ProgrammedCrossbar::assign(std::size_t i, std::size_t j,
                                std::vector<std::uint16_t> level_indices) {
    const NodeSpec& spec = row_specs_[i];
    if (level_indices.size() != spec.device_count()) {
        throw std::invalid_argument("ProgrammedCrossbar::assign: assignment length != device count");
    }
    const unsigned L = row_levels_[i].count();
    for (const auto idx : level_indices) {
        if (idx >= L) throw std::out_of_range("ProgrammedCrossbar::assign: level index out of range");
    }
    assignments_[i * cols_ + j] = std::move(level_indices);
}

void ProgrammedCrossbar::realize(const NonIdealityConfig& cfg, std::uint64_t trial) {
    const double drift = cfg.boundary_drift_frac;
    const double var = cfg.conductance_var_frac;
    for (std::size_t i = 0; i < rows_; ++i) {
        const NodeSpec& spec = row_specs_[i];
        const LevelSet& levels = row_levels_[i];
        for (std::size_t j = 0; j < cols_; ++j) {
            const auto& assignment = assignments_[i * cols_ + j];
            if (assignment.empty()) {
                throw std::logic_error("ProgrammedCrossbar::realize: unprogrammed cell");
            }
            auto& devices = realized_[i * cols_ + j];
            devices.resize(assignment.size());
            for (unsigned d = 0; d < assignment.size(); ++d) {
                double g = levels[assignment[d]];
                if (drift > 0.0) {
                    // Per-device window drift, clipped at 3 sigma so the
                    // window cannot invert; the device's levels re-derive
                    // inside the drifted window.
                    rng::Substream zs(cfg.master_seed,
                                      {rng::Stream::drift, i, j,
                                       pack_tag_device(stream_tag_, d), trial});
                    const double clip = 3.0 * drift;
                    const double e_on = std::clamp(drift * zs.normal01(), -clip, clip);
                    const double e_off = std::clamp(drift * zs.normal01(), -clip, clip);
                    g = level_in_shifted_window(spec.device, assignment[d],
                                                spec.device.r_on_ohm * (1.0 + e_on),
                                                spec.device.r_off_ohm * (1.0 + e_off));
                }
                if (var > 0.0) {
                    rng::Substream vs(cfg.master_seed,
                                      {rng::Stream::variability, i, j,
                                       pack_tag_device(stream_tag_, d), trial});
                    g = perturb_level(g, var, vs);
                }
                devices[d] = g;
            }
            node_g_[i * cols_ + j] = effective_node_conductance(devices, spec.topology);
        }
    }
}

double effective_node_conductance(std::span<const double> device_conductances,
                                  NodeTopology topology,
                                  std::span<const double> wire_series_ohm) {
    if (device_conductances.empty()) {
        throw std::domain_error("effective_node_conductance: empty assignment");
    }
    const bool wired = !wire_series_ohm.empty();
    if (wired && wire_series_ohm.size() != device_conductances.size()) {
        throw std::invalid_argument("effective_node_conductance: wire list length mismatch");
    }
    auto device_g = [&](std::size_t d) {
        const double g = device_conductances[d];
        if (!wired) return g;
        return 1.0 / (1.0 / g + wire_series_ohm[d]);
    };

    switch (topology) {
        case NodeTopology::parallel: {
            double sum = 0.0;
            for (std::size_t d = 0; d < device_conductances.size(); ++d) sum += device_g(d);
            return sum;
        }
        case NodeTopology::series: {
            double inv = 0.0;
            for (std::size_t d = 0; d < device_conductances.size(); ++d) {
                const double g = device_g(d);
                if (!(g > 0.0)) {
                    throw std::domain_error(
                        "effective_node_conductance: zero conductance in series path");
                }
                inv += 1.0 / g;
            }
            return 1.0 / inv;
        }
        case NodeTopology::three_d_two_layer: {
            const std::size_t n = device_conductances.size();
            if (n % 2 != 0) {
                throw std::invalid_argument(
                    "effective_node_conductance: 3D node needs an even device count");
            }
            const std::size_t branches = n / 2;
            double sum = 0.0;
            for (std::size_t b = 0; b < branches; ++b) {
                const double g1 = device_g(b);
                const double g2 = device_g(branches + b);
                if (!(g1 > 0.0) || !(g2 > 0.0)) {
                    throw std::domain_error(
                        "effective_node_conductance: zero conductance in series path");
                }
                sum += 1.0 / (1.0 / g1 + 1.0 / g2);
            }
            return sum;
        }
    }
    throw std::logic_error("effective_node_conductance: unknown topology");
}

std::vector<double> ideal_vmm(const Matrix& node_conductance, std::span<const double> v) {
    if (v.size() != node_conductance.rows) {
        throw std::invalid_argument("ideal_vmm: input length != crossbar rows");
    }
    std::vector<double> out(node_conductance.cols);
    for (std::size_t j = 0; j < node_conductance.cols; ++j) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < node_conductance.rows; ++i) {
            acc.add(v[i] * node_conductance.at(i, j));
        }
        out[j] = acc.value();
    }
    return out;
}

std::vector<double> ideal_vmm(const ProgrammedCrossbar& xbar, std::span<const double> v) {
    if (v.size() != xbar.rows()) {
        throw std::invalid_argument("ideal_vmm: input length != crossbar rows");
    }
    std::vector<double> out(xbar.cols());
    for (std::size_t j = 0; j < xbar.cols(); ++j) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < xbar.rows(); ++i) {
            acc.add(v[i] * xbar.node_conductance(i, j));
        }
        out[j] = acc.value();
    }
    return out;
}

namespace {

struct ColumnAccumulators {
    std::vector<CompensatedSum> real;
    std::vector<CompensatedSum> ideal;
};

/// Accumulate one crossbar's contribution into per-column sums. Row-level
/// effects (input noise, per-device wire resistance) apply here, keyed by
/// global row index so tiling does not re-seed them.
void accumulate_read(const ProgrammedCrossbar& xbar, const Matrix* reference,
                     std::span<const double> v, const NonIdealityConfig& cfg,
                     std::uint64_t trial, const ReadOptions& opts,
                     ColumnAccumulators& acc) {
    const std::size_t n = xbar.rows();
    const std::size_t k = xbar.cols();
    if (v.size() != n) {
        throw std::invalid_argument("noisy_read: input length != crossbar rows");
    }
    if (reference && (reference->rows != n || reference->cols != k)) {
        throw std::invalid_argument("noisy_read: reference shape != crossbar shape");
    }

    std::vector<double> v_used(v.begin(), v.end());
    if (cfg.input_noise_variance > 0.0) {
        const double sigma = std::sqrt(cfg.input_noise_variance);
        for (std::size_t i = 0; i < n; ++i) {
            v_used[i] += sigma * rng::normal01(cfg.master_seed,
                                               {rng::Stream::input_noise,
                                                opts.row_offset + i, opts.read_tag,
                                                xbar.stream_tag(), trial},
                                               0);
        }
    }

    std::vector<double> wire;
    for (std::size_t i = 0; i < n; ++i) {
        const NodeSpec& spec = xbar.row_spec(i);
        for (std::size_t j = 0; j < k; ++j) {
            double g_node;
            if (cfg.wire_enabled) {
                const auto& devices = xbar.realized_devices(i, j);
                wire.resize(devices.size());
                for (unsigned d = 0; d < devices.size(); ++d) {
                    const double r = rng::normal(cfg.master_seed,
                                                 {rng::Stream::wire, opts.row_offset + i, j,
                                                  pack_tag_device(xbar.stream_tag(), d), trial},
                                                 0, cfg.wire_res_mean_ohm, cfg.wire_res_std_ohm);
                    wire[d] = std::max(r, 0.0);
                }
                g_node = effective_node_conductance(devices, spec.topology, wire);
            } else {
                g_node = xbar.node_conductance(i, j);
            }
            acc.real[j].add(v_used[i] * g_node);
            if (reference) {
                const double vi = opts.reference_shares_input_noise ? v_used[i] : v[i];
                acc.ideal[j].add(vi * reference->at(i, j));
            }
        }
    }
}

/// Column-level sensing chain: read instability on the real current, then
/// sensing noise applied identically to the real and reference currents.
ReadResult finish_read(ColumnAccumulators& acc, bool have_reference,
                       const NonIdealityConfig& cfg, std::uint64_t trial,
                       std::uint32_t stream_tag, std::uint64_t read_tag) {
    const std::size_t k = acc.real.size();
    ReadResult result;
    result.currents.resize(k);
    for (std::size_t j = 0; j < k; ++j) result.currents[j] = acc.real[j].value();

    if (cfg.read_instability_frac > 0.0) {
        for (std::size_t j = 0; j < k; ++j) {
            const double z = rng::normal01(cfg.master_seed,
                                           {rng::Stream::instability, j, read_tag,
                                            stream_tag, trial},
                                           0);
            result.currents[j] *= 1.0 + cfg.read_instability_frac * z;
        }
    }

    if (have_reference) {
        result.ideal_currents.resize(k);
        for (std::size_t j = 0; j < k; ++j) result.ideal_currents[j] = acc.ideal[j].value();
    }

    if (cfg.read_noise_frac > 0.0) {
        for (std::size_t j = 0; j < k; ++j) {
            const double basis = have_reference ? result.ideal_currents[j] : result.currents[j];
            const double noise = cfg.read_noise_frac * std::abs(basis) *
                                 rng::normal01(cfg.master_seed,
                                               {rng::Stream::read_noise, j, read_tag,
                                                stream_tag, trial},
                                               0);
            result.currents[j] += noise;
            if (have_reference) result.ideal_currents[j] += noise;
        }
    }

    if (have_reference) {
        result.rce_percent.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            const double denom = std::abs(result.ideal_currents[j]);
            if (denom < kUndefinedCurrentFloor) {
                result.rce_percent[j] = std::numeric_limits<double>::quiet_NaN();
                ++result.undefined_rce_count;
            } else {
                result.rce_percent[j] =
                    100.0 * std::abs(result.ideal_currents[j] - result.currents[j]) / denom;
            }
        }
    }
    return result;
}

}  // namespace

ReadResult noisy_read(const ProgrammedCrossbar& xbar, std::span<const double> v,
                      const NonIdealityConfig& cfg, std::uint64_t trial,
                      const ReadOptions& opts) {
    ColumnAccumulators acc;
    acc.real.resize(xbar.cols());
    acc.ideal.resize(xbar.cols());
    accumulate_read(xbar, opts.reference, v, cfg, trial, opts, acc);
    return finish_read(acc, opts.reference != nullptr, cfg, trial, xbar.stream_tag(),
                       opts.read_tag);
}

ReadResult tile_and_sum(std::span<const ProgrammedCrossbar*> tiles,
                        std::span<const Matrix*> references,
                        std::span<const double> v_full,
                        const NonIdealityConfig& cfg, std::uint64_t trial,
                        bool reference_shares_input_noise) {
    if (tiles.empty()) {
        throw std::invalid_argument("tile_and_sum: no tiles");
    }
    const bool have_refs = !references.empty();
    if (have_refs && references.size() != tiles.size()) {
        throw std::invalid_argument("tile_and_sum: one reference per tile required");
    }
    const std::size_t k = tiles.front()->cols();
    std::size_t total_rows = 0;
    for (const auto* tile : tiles) {
        if (tile->cols() != k) {
            throw std::invalid_argument("tile_and_sum: tiles must share the column count");
        }
        total_rows += tile->rows();
    }
    if (total_rows != v_full.size()) {
        throw std::invalid_argument("tile_and_sum: tile rows do not add up to the input length");
    }

    ColumnAccumulators acc;
    acc.real.resize(k);
    acc.ideal.resize(k);
    std::size_t offset = 0;
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        ReadOptions opts;
        opts.reference = have_refs ? references[t] : nullptr;
        opts.reference_shares_input_noise = reference_shares_input_noise;
        opts.row_offset = offset;
        accumulate_read(*tiles[t], opts.reference, v_full.subspan(offset, tiles[t]->rows()),
                        cfg, trial, opts, acc);
        offset += tiles[t]->rows();
    }
    return finish_read(acc, have_refs, cfg, trial, tiles.front()->stream_tag(), 0);
}

std::vector<double> signed_read(std::span<const std::size_t> pos_cols,
                                std::span<const std::size_t> neg_cols,
                                const ReadResult& read) {
    if (pos_cols.size() != neg_cols.size()) {
        throw std::invalid_argument("signed_read: pos/neg pairing length mismatch");
    }
    std::vector<bool> used(read.currents.size(), false);
    auto take = [&](std::size_t col) {
        if (col >= read.currents.size()) {
            throw std::out_of_range("signed_read: column index out of range");
        }
        if (used[col]) {
            throw std::invalid_argument("signed_read: overlapping column pairs");
        }
        used[col] = true;
        return read.currents[col];
    };
    std::vector<double> out(pos_cols.size());
    for (std::size_t p = 0; p < pos_cols.size(); ++p) {
        const double pos = take(pos_cols[p]);
        const double neg = take(neg_cols[p]);
        out[p] = pos - neg;
    }
    return out;
}

std::vector<double> signed_read_interleaved(const ReadResult& read) {
    const std::size_t pairs = read.currents.size() / 2;
    if (read.currents.size() % 2 != 0) {
        throw std::invalid_argument("signed_read_interleaved: odd column count");
    }
    std::vector<double> out(pairs);
    for (std::size_t p = 0; p < pairs; ++p) {
        out[p] = read.currents[2 * p] - read.currents[2 * p + 1];
    }
    return out;
}

}  // namespace srxbar
