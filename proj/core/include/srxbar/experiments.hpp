#pragma once

#include <string>

#include "srxbar/config.hpp"

// Experiment runners. Each returns the complete CSV document (comment
// header + rows + aggregate rows) as a string; the CLI writes it to disk
// atomically. All runners are deterministic in (config, seed) and
// independent of the worker-thread count.

namespace srxbar {

std::string run_levels_report(const ExperimentConfig& cfg);
std::string run_rce_grid(const ExperimentConfig& cfg);
std::string run_ratio_sweep(const ExperimentConfig& cfg);
std::string run_aging_sweep(const ExperimentConfig& cfg);
std::string run_noise_sweep(const ExperimentConfig& cfg);
std::string run_wire_table(const ExperimentConfig& cfg);
std::string run_nn_grid(const ExperimentConfig& cfg);
std::string run_mapdump(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace srxbar
