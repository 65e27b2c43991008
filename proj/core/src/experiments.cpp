#include "srxbar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "srxbar/csv.hpp"
#include "srxbar/errors.hpp"
#include "srxbar/levels.hpp"
#include "srxbar/mapper.hpp"
#include "srxbar/net.hpp"
#include "srxbar/rng.hpp"

namespace srxbar {

namespace {

constexpr const char* kToolVersion = "srxbar 0.1.0";

void stamp_header(CsvWriter& csv, const ExperimentConfig& cfg) {
    csv.comment(kToolVersion);
    csv.comment("experiment " + std::string(to_string(cfg.kind)));
    csv.comment("seed " + std::to_string(cfg.seed));
    char hash[32];
    std::snprintf(hash, sizeof(hash), "config fnv1a64 %016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_config_text(cfg))));
    csv.comment(hash);
    csv.comment("trials " + std::to_string(cfg.effective_trials()));
}

/// Deterministic trial fan-out: trial t always lands in slot t no matter
/// how many workers run.
void parallel_trials(unsigned trials, unsigned threads,
                     const std::function<void(unsigned)>& body) {
    threads = std::min(std::max(threads, 1u), trials);
    if (threads == 1) {
        for (unsigned t = 0; t < trials; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (unsigned t = w; t < trials; t += threads) body(t);
        });
    }
    for (auto& th : pool) th.join();
}

/// One sweep cell: a fully specified device/node configuration whose RCE
/// samples go into the CSV under `prefix` columns.
struct Cell {
    std::vector<std::string> prefix;
    DeviceSpec device;
    unsigned m = 1;
    unsigned L = 2;
    NonIdealityConfig nonideal;
    bool reference_shares_input_noise = false;
};

struct CellSamples {
    std::vector<std::vector<double>> rce_per_trial;  // [trial][physical column]
    std::uint64_t combinatorial_count = 0;
};

/// Run the random weight/input trial protocol for one cell: draw a weight
/// matrix uniform in [w_min, w_max] and inputs uniform in [0, 1] V, map
/// through the signed differential quantizer, read with the cell's
/// non-idealities, and collect per-column RCE.
CellSamples run_cell(const ExperimentConfig& cfg, const Cell& cell) {
    DeviceSpec device = cell.device;
    device.level_count = cell.L;
    const LevelSet levels = derive_levels(device);
    const double w_mag = std::max(std::abs(cfg.w_min), std::abs(cfg.w_max));
    const QuantizerTable q = build_quantizer(levels, cell.m, cfg.topology, 0.0, w_mag);

    NodeSpec node;
    node.memristors_per_node = cell.m;
    node.topology = cfg.topology;
    node.device = device;

    NonIdealityConfig nonideal = cell.nonideal;
    nonideal.master_seed = cfg.seed;

    const unsigned trials = cfg.effective_trials();
    CellSamples out;
    out.combinatorial_count = q.combinatorial_count();
    out.rce_per_trial.resize(trials);

    parallel_trials(trials, cfg.threads, [&](unsigned trial) {
        Matrix weights(cfg.rows, cfg.cols);
        for (unsigned i = 0; i < cfg.rows; ++i) {
            for (unsigned j = 0; j < cfg.cols; ++j) {
                weights.at(i, j) = rng::uniform(cfg.seed, {rng::Stream::weights, i, j, 0, trial},
                                                0, cfg.w_min, cfg.w_max);
            }
        }
        std::vector<double> v(cfg.rows);
        for (unsigned i = 0; i < cfg.rows; ++i) {
            v[i] = rng::uniform(cfg.seed, {rng::Stream::inputs, i, 0, 0, trial}, 0, 0.0, 1.0);
        }

        MappedMatrix mapped = map_matrix(weights, q, node, /*signed_mapping=*/true);
        mapped.crossbar.realize(nonideal, trial);

        ReadOptions opts;
        opts.reference = &mapped.reference;
        opts.reference_shares_input_noise = cell.reference_shares_input_noise;
        const ReadResult rr = noisy_read(mapped.crossbar, v, nonideal, trial, opts);
        out.rce_per_trial[trial] = rr.rce_percent;
    });
    return out;
}

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;
};

Aggregate aggregate_samples(const CellSamples& samples) {
    Aggregate agg;
    CompensatedSum sum;
    for (const auto& trial : samples.rce_per_trial) {
        for (const double x : trial) {
            if (std::isnan(x)) continue;
            sum.add(x);
            ++agg.n;
        }
    }
    if (agg.n == 0) return agg;
    agg.mean = sum.value() / static_cast<double>(agg.n);
    CompensatedSum sq;
    for (const auto& trial : samples.rce_per_trial) {
        for (const double x : trial) {
            if (std::isnan(x)) continue;
            const double d = x - agg.mean;
            sq.add(d * d);
        }
    }
    agg.stddev = agg.n > 1 ? std::sqrt(sq.value() / static_cast<double>(agg.n - 1)) : 0.0;
    return agg;
}

void emit_cell(CsvWriter& csv, const Cell& cell, const CellSamples& samples) {
    const std::string m_str = std::to_string(cell.m);
    const std::string L_str = std::to_string(cell.L);
    const std::string lc_str = std::to_string(samples.combinatorial_count);
    std::vector<std::string> fields;
    for (std::size_t t = 0; t < samples.rce_per_trial.size(); ++t) {
        const auto& row = samples.rce_per_trial[t];
        for (std::size_t c = 0; c < row.size(); ++c) {
            fields = cell.prefix;
            fields.insert(fields.end(), {m_str, L_str, lc_str, std::to_string(t),
                                         std::to_string(c), format_double(row[c])});
            csv.row(fields);
        }
    }
    const Aggregate agg = aggregate_samples(samples);
    fields = cell.prefix;
    fields.insert(fields.end(), {m_str, L_str, lc_str, "mean", "all", format_double(agg.mean)});
    csv.row(fields);
    fields = cell.prefix;
    fields.insert(fields.end(),
                  {m_str, L_str, lc_str, "std", "all", format_double(agg.stddev)});
    csv.row(fields);
}

std::vector<std::string> rce_columns(std::vector<std::string> prefix) {
    prefix.insert(prefix.end(), {"m", "L", "L_C", "trial", "column", "rce_percent"});
    return prefix;
}

std::string run_sweep(const ExperimentConfig& cfg, std::vector<std::string> prefix_columns,
                      const std::vector<Cell>& cells) {
    CsvWriter csv;
    stamp_header(csv, cfg);
    csv.columns(rce_columns(std::move(prefix_columns)));
    for (const auto& cell : cells) {
        emit_cell(csv, cell, run_cell(cfg, cell));
    }
    return csv.str();
}

DeviceSpec base_device(const ExperimentConfig& cfg) {
    DeviceSpec device = cfg.device;
    if (cfg.nonideal.aging && cfg.nonideal.aging->ratio > 0.0) {
        device = apply_aging(device, *cfg.nonideal.aging);
    }
    return device;
}

}  // namespace

std::string run_rce_grid(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    const DeviceSpec device = base_device(cfg);
    for (const unsigned m : cfg.m_list) {
        for (const unsigned L : cfg.L_list) {
            Cell cell;
            cell.device = device;
            cell.m = m;
            cell.L = L;
            cell.nonideal = cfg.nonideal;
            cells.push_back(std::move(cell));
        }
    }
    return run_sweep(cfg, {}, cells);
}

std::string run_ratio_sweep(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (const double ratio : cfg.ratio_list) {
        if (!(ratio > 1.0)) {
            throw config_error("ratio sweep: R_OFF/R_ON ratios must exceed 1");
        }
        DeviceSpec device = cfg.device;
        device.r_off_ohm = ratio * device.r_on_ohm;
        for (const unsigned m : cfg.m_list) {
            for (const unsigned L : cfg.L_list) {
                Cell cell;
                cell.prefix = {format_double(ratio)};
                cell.device = device;
                cell.m = m;
                cell.L = L;
                cell.nonideal = cfg.nonideal;
                cells.push_back(std::move(cell));
            }
        }
    }
    return run_sweep(cfg, {"ratio"}, cells);
}

std::string run_aging_sweep(const ExperimentConfig& cfg) {
    const AgingType type = cfg.nonideal.aging ? cfg.nonideal.aging->type : AgingType::type3;
    std::vector<Cell> cells;
    for (const double ratio : cfg.aging_ratio_list) {
        // Reprogramming semantics: the aged window re-derives its levels,
        // and the weight map is rebuilt inside the aged window.
        const DeviceSpec device =
            ratio > 0.0 ? apply_aging(cfg.device, {type, ratio}) : cfg.device;
        for (const unsigned m : cfg.m_list) {
            for (const unsigned L : cfg.L_list) {
                Cell cell;
                cell.prefix = {format_double(ratio)};
                cell.device = device;
                cell.m = m;
                cell.L = L;
                cell.nonideal = cfg.nonideal;
                cell.nonideal.aging.reset();
                cells.push_back(std::move(cell));
            }
        }
    }
    return run_sweep(cfg, {"aging_ratio"}, cells);
}

std::string run_noise_sweep(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    const DeviceSpec device = base_device(cfg);
    for (const double variance : cfg.noise_variance_list) {
        if (variance < 0.0) {
            throw config_error("noise sweep: variance must be >= 0");
        }
        for (const unsigned m : cfg.m_list) {
            for (const unsigned L : cfg.L_list) {
                Cell cell;
                cell.prefix = {format_double(variance)};
                cell.device = device;
                cell.m = m;
                cell.L = L;
                cell.nonideal = cfg.nonideal;
                cell.nonideal.input_noise_variance = variance;
                // The reference crossbar (ideal weights) reads the same
                // noisy input, so RCE isolates the resolution error.
                cell.reference_shares_input_noise = true;
                cells.push_back(std::move(cell));
            }
        }
    }
    return run_sweep(cfg, {"variance"}, cells);
}

std::string run_wire_table(const ExperimentConfig& cfg) {
    // Three conditions per node configuration: N = boundary drift only,
    // Y = drift + wire, R = drift + wire + read instability. The drift,
    // wire and instability magnitudes come from [nonideal] (the bundled
    // config carries 0.2 / 2.5 +/- 0.25 ohm / 0.1).
    // Cell order mirrors the table's reading order: rows by L, then node
    // size, then the N/Y/R triplet.
    const DeviceSpec device = base_device(cfg);
    std::vector<Cell> cells;
    for (const unsigned L : cfg.L_list) {
        for (const unsigned m : cfg.m_list) {
            for (const char condition : {'N', 'Y', 'R'}) {
                Cell cell;
                cell.prefix = {std::string(1, condition)};
                cell.device = device;
                cell.m = m;
                cell.L = L;
                cell.nonideal = cfg.nonideal;
                cell.nonideal.wire_enabled = condition != 'N' && cfg.nonideal.wire_enabled;
                cell.nonideal.read_instability_frac =
                    condition == 'R' ? cfg.nonideal.read_instability_frac : 0.0;
                cells.push_back(std::move(cell));
            }
        }
    }
    return run_sweep(cfg, {"condition"}, cells);
}

std::string run_levels_report(const ExperimentConfig& cfg) {
    CsvWriter csv;
    stamp_header(csv, cfg);
    csv.columns({"m", "L", "L_C", "effective_count"});
    for (const unsigned m : cfg.m_list) {
        for (const unsigned L : cfg.L_list) {
            const std::uint64_t lc = count_unique_levels(m, L);
            std::string effective;
            const bool explicit_mismatch =
                cfg.device.placement == LevelPlacement::explicit_list &&
                cfg.device.explicit_levels.size() != L;
            // An explicit list pins one L; grid entries at other L report
            // the combinatorial count only. Counts past the cap likewise.
            if (lc <= kDefaultEnumerationCap && !explicit_mismatch) {
                DeviceSpec device = cfg.device;
                device.level_count = L;
                const LevelCatalog catalog = enumerate_node_levels(derive_levels(device), m);
                effective = std::to_string(catalog.effective_count);
            }
            csv.row({std::to_string(m), std::to_string(L), std::to_string(lc), effective});
        }
    }
    return csv.str();
}

std::string run_nn_grid(const ExperimentConfig& cfg) {
    const NetworkDef net = load_network_mxw(cfg.nn_weights_path);
    const Dataset data = load_dataset_csv(cfg.nn_dataset_path);
    const std::vector<EvalRow> rows =
        evaluate_grid(net, data, cfg.nn_grid, cfg.variability_list, cfg.effective_trials(),
                      cfg.seed, cfg.device, cfg.topology);

    CsvWriter csv;
    stamp_header(csv, cfg);
    csv.columns({"m", "L", "L_C", "variability_frac", "accuracy_percent",
                 "float_baseline_percent", "trials"});
    for (const auto& row : rows) {
        csv.row({std::to_string(row.m), std::to_string(row.L), std::to_string(row.level_count),
                 format_double(row.variability_frac), format_double(row.accuracy_percent),
                 format_double(row.float_baseline_percent), std::to_string(row.trials)});
    }
    return csv.str();
}

std::string run_mapdump(const ExperimentConfig& cfg) {
    const LevelSet levels = derive_levels(cfg.device);
    const double w_lo = std::max(cfg.w_min, 0.0);
    const QuantizerTable q =
        build_quantizer(levels, cfg.node_m, cfg.topology, w_lo, cfg.w_max);
    std::ostringstream os;
    os << "# " << kToolVersion << "\n";
    os << "# experiment mapdump\n";
    os << "# seed " << cfg.seed << "\n";
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_config_text(cfg))));
    os << "# config fnv1a64 " << hash << "\n";
    write_mapping_csv(os, q);
    return os.str();
}

std::string run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::levels: return run_levels_report(cfg);
        case ExperimentKind::rce: return run_rce_grid(cfg);
        case ExperimentKind::ratio: return run_ratio_sweep(cfg);
        case ExperimentKind::aging: return run_aging_sweep(cfg);
        case ExperimentKind::noise: return run_noise_sweep(cfg);
        case ExperimentKind::wire: return run_wire_table(cfg);
        case ExperimentKind::nn: return run_nn_grid(cfg);
        case ExperimentKind::mapdump: return run_mapdump(cfg);
    }
    throw std::logic_error("run_experiment: unknown kind");
}

}  // namespace srxbar
