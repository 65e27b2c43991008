// Command-line experiment runner. Subcommands reproduce the simulator's
// sweep experiments as CSV artifacts; see configs/ for ready-made inputs.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 simulation error.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "srxbar/config.hpp"
#include "srxbar/csv.hpp"
#include "srxbar/errors.hpp"
#include "srxbar/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> trials;
    std::optional<unsigned> threads;
    bool quiet = false;
};

constexpr std::pair<const char*, srxbar::ExperimentKind> kSubcommands[] = {
    {"levels", srxbar::ExperimentKind::levels},
    {"rce", srxbar::ExperimentKind::rce},
    {"ratio", srxbar::ExperimentKind::ratio},
    {"aging", srxbar::ExperimentKind::aging},
    {"noise", srxbar::ExperimentKind::noise},
    {"wire", srxbar::ExperimentKind::wire},
    {"nn", srxbar::ExperimentKind::nn},
    {"mapdump", srxbar::ExperimentKind::mapdump},
};

constexpr const char* kDescriptions[] = {
    "unique/effective conductance level table (m x L)",
    "relative current error grid over node sizes and level counts",
    "RCE grid repeated across R_OFF/R_ON ratios",
    "RCE grid under type-3 aging with reprogramming",
    "RCE under additive input noise, vs an ideal-weight reference",
    "wire resistance / boundary drift / read instability table",
    "neural inference accuracy across node configurations",
    "dump the weight-to-conductance programming table",
};

int run(srxbar::ExperimentKind kind, const CliOptions& opts) {
    srxbar::ExperimentConfig cfg;
    try {
        cfg = srxbar::load_config_file(opts.config_path);
    } catch (const srxbar::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    cfg.kind = kind;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.trials) cfg.trials = *opts.trials;
    if (opts.threads) cfg.threads = std::max(1u, *opts.threads);
    if (opts.out) cfg.out_path = *opts.out;

    std::string csv;
    try {
        csv = srxbar::run_experiment(cfg);
    } catch (const srxbar::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    }

    if (cfg.out_path == "-") {
        std::cout << csv;
        return 0;
    }
    try {
        srxbar::write_file_atomic(cfg.out_path, csv);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 3;
    }
    if (!opts.quiet) {
        std::cerr << "wrote " << cfg.out_path << "\n";
    }
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"super-resolution memristor crossbar simulator"};
    app.require_subcommand(1);

    CliOptions opts;
    std::size_t index = 0;
    for (const auto& [name, kind] : kSubcommands) {
        (void)kind;
        CLI::App* sub = app.add_subcommand(name, kDescriptions[index++]);
        sub->add_option("--config", opts.config_path, "experiment config file")->required();
        sub->add_option("--seed", opts.seed, "master seed override");
        sub->add_option("--out", opts.out, "output path ('-' for stdout)");
        sub->add_option("--trials", opts.trials, "trial count override");
        sub->add_option("--threads", opts.threads, "worker threads (deterministic output)");
        sub->add_flag("--quiet", opts.quiet, "suppress the completion note");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help / --version
        }
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    for (const auto& [name, kind] : kSubcommands) {
        if (app.got_subcommand(name)) {
            return run(kind, opts);
        }
    }
    std::cerr << app.help();
    return 2;
}

int main(int argc, char** argv) { return cli_main(argc, argv); }
