#include "srxbar/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "srxbar/csv.hpp"
#include "srxbar/errors.hpp"

namespace srxbar {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(std::string_view source, std::size_t line_no, const std::string& what) {
    std::ostringstream os;
    os << source << ":" << line_no << ": " << what;
    throw config_error(os.str());
}

double parse_double(std::string_view source, std::size_t line_no, const std::string& key,
                    const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(source, line_no, "key '" + key + "': expected a number, got '" + value + "'");
    }
}

std::uint64_t parse_u64(std::string_view source, std::size_t line_no, const std::string& key,
                        const std::string& value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        fail(source, line_no, "key '" + key + "': expected an unsigned integer, got '" + value + "'");
    }
    return v;
}

bool parse_bool(std::string_view source, std::size_t line_no, const std::string& key,
                const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail(source, line_no, "key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t comma = value.find(',', start);
        out.push_back(trim(value.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::levels: return "levels";
        case ExperimentKind::rce: return "rce";
        case ExperimentKind::ratio: return "ratio";
        case ExperimentKind::aging: return "aging";
        case ExperimentKind::noise: return "noise";
        case ExperimentKind::wire: return "wire";
        case ExperimentKind::nn: return "nn";
        case ExperimentKind::mapdump: return "mapdump";
    }
    return "?";
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source_name) {
    ExperimentConfig cfg;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    bool aging_requested = false;
    AgingState aging;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(source_name, line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"experiment", "crossbar", "device",
                                          "node",       "nonideal", "sweep", "nn"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
                fail(source_name, line_no, "unknown section [" + section + "]");
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(source_name, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) fail(source_name, line_no, "empty key or value");

        auto num = [&] { return parse_double(source_name, line_no, key, value); };
        auto u64 = [&] { return parse_u64(source_name, line_no, key, value); };
        auto unsigned_list = [&] {
            std::vector<unsigned> out;
            for (const auto& item : split_list(value)) {
                out.push_back(static_cast<unsigned>(parse_u64(source_name, line_no, key, item)));
            }
            return out;
        };
        auto double_list = [&] {
            std::vector<double> out;
            for (const auto& item : split_list(value)) {
                out.push_back(parse_double(source_name, line_no, key, item));
            }
            return out;
        };

        if (section == "experiment") {
            if (key == "kind") {
                if (value == "levels") cfg.kind = ExperimentKind::levels;
                else if (value == "rce") cfg.kind = ExperimentKind::rce;
                else if (value == "ratio") cfg.kind = ExperimentKind::ratio;
                else if (value == "aging") cfg.kind = ExperimentKind::aging;
                else if (value == "noise") cfg.kind = ExperimentKind::noise;
                else if (value == "wire") cfg.kind = ExperimentKind::wire;
                else if (value == "nn") cfg.kind = ExperimentKind::nn;
                else if (value == "mapdump") cfg.kind = ExperimentKind::mapdump;
                else fail(source_name, line_no, "unknown experiment kind '" + value + "'");
            } else if (key == "trials") {
                cfg.trials = static_cast<unsigned>(u64());
            } else if (key == "seed") {
                cfg.seed = u64();
            } else if (key == "threads") {
                cfg.threads = std::max<unsigned>(1, static_cast<unsigned>(u64()));
            } else if (key == "out") {
                cfg.out_path = value;
            } else if (key == "w_min") {
                cfg.w_min = num();
            } else if (key == "w_max") {
                cfg.w_max = num();
            } else {
                fail(source_name, line_no, "unknown key '" + key + "' in [experiment]");
            }
        } else if (section == "crossbar") {
            if (key == "rows") cfg.rows = static_cast<unsigned>(u64());
            else if (key == "cols") cfg.cols = static_cast<unsigned>(u64());
            else fail(source_name, line_no, "unknown key '" + key + "' in [crossbar]");
        } else if (section == "device") {
            if (key == "r_on_ohm") cfg.device.r_on_ohm = num();
            else if (key == "r_off_ohm") cfg.device.r_off_ohm = num();
            else if (key == "levels") cfg.device.level_count = static_cast<unsigned>(u64());
            else if (key == "placement") {
                if (value == "linear_conductance")
                    cfg.device.placement = LevelPlacement::linear_in_conductance;
                else if (value == "linear_resistance")
                    cfg.device.placement = LevelPlacement::linear_in_resistance;
                else if (value == "log_conductance")
                    cfg.device.placement = LevelPlacement::log_in_conductance;
                else if (value == "explicit")
                    cfg.device.placement = LevelPlacement::explicit_list;
                else fail(source_name, line_no, "unknown placement '" + value + "'");
            } else if (key == "explicit_levels_uS") {
                cfg.device.explicit_levels.clear();
                for (const double g : double_list()) {
                    cfg.device.explicit_levels.push_back(g * 1e-6);
                }
            } else {
                fail(source_name, line_no, "unknown key '" + key + "' in [device]");
            }
        } else if (section == "node") {
            if (key == "m") cfg.node_m = static_cast<unsigned>(u64());
            else if (key == "m_list") cfg.m_list = unsigned_list();
            else if (key == "L_list") cfg.L_list = unsigned_list();
            else if (key == "topology") {
                if (value == "parallel") cfg.topology = NodeTopology::parallel;
                else if (value == "series") cfg.topology = NodeTopology::series;
                else if (value == "3d_two_layer")
                    cfg.topology = NodeTopology::three_d_two_layer;
                else fail(source_name, line_no, "unknown topology '" + value + "'");
            } else if (key == "grid") {
                cfg.nn_grid.clear();
                for (const auto& item : split_list(value)) {
                    const std::size_t x = item.find('x');
                    if (x == std::string::npos) {
                        fail(source_name, line_no, "grid entries look like MxL, got '" + item + "'");
                    }
                    NodeGridPoint p;
                    p.m = static_cast<unsigned>(
                        parse_u64(source_name, line_no, key, trim(item.substr(0, x))));
                    p.L = static_cast<unsigned>(
                        parse_u64(source_name, line_no, key, trim(item.substr(x + 1))));
                    cfg.nn_grid.push_back(p);
                }
            } else {
                fail(source_name, line_no, "unknown key '" + key + "' in [node]");
            }
        } else if (section == "nonideal") {
            if (key == "read_noise_frac") cfg.nonideal.read_noise_frac = num();
            else if (key == "conductance_var_frac") cfg.nonideal.conductance_var_frac = num();
            else if (key == "wire_enabled") cfg.nonideal.wire_enabled =
                parse_bool(source_name, line_no, key, value);
            else if (key == "wire_res_mean_ohm") cfg.nonideal.wire_res_mean_ohm = num();
            else if (key == "wire_res_std_ohm") cfg.nonideal.wire_res_std_ohm = num();
            else if (key == "boundary_drift_frac") cfg.nonideal.boundary_drift_frac = num();
            else if (key == "read_instability_frac") cfg.nonideal.read_instability_frac = num();
            else if (key == "input_noise_variance") cfg.nonideal.input_noise_variance = num();
            else if (key == "aging_type") {
                aging_requested = value != "none";
                if (value == "type1") aging.type = AgingType::type1;
                else if (value == "type2") aging.type = AgingType::type2;
                else if (value == "type3") aging.type = AgingType::type3;
                else if (value != "none")
                    fail(source_name, line_no, "unknown aging type '" + value + "'");
            } else if (key == "aging_ratio") {
                aging.ratio = num();
            } else {
                fail(source_name, line_no, "unknown key '" + key + "' in [nonideal]");
            }
        } else if (section == "sweep") {
            if (key == "ratio_list") cfg.ratio_list = double_list();
            else if (key == "aging_ratio_list") cfg.aging_ratio_list = double_list();
            else if (key == "noise_variance_list") cfg.noise_variance_list = double_list();
            else if (key == "variability_list") cfg.variability_list = double_list();
            else fail(source_name, line_no, "unknown key '" + key + "' in [sweep]");
        } else if (section == "nn") {
            if (key == "weights") cfg.nn_weights_path = value;
            else if (key == "dataset") cfg.nn_dataset_path = value;
            else if (key == "variability_list") cfg.variability_list = double_list();
            else fail(source_name, line_no, "unknown key '" + key + "' in [nn]");
        } else {
            fail(source_name, line_no, "key '" + key + "' outside any section");
        }
    }

    if (aging_requested) cfg.nonideal.aging = aging;

    // Structural validation.
    if (cfg.rows == 0 || cfg.cols == 0) {
        throw config_error(std::string(source_name) + ": crossbar dimensions must be >= 1");
    }
    if (cfg.m_list.empty() || cfg.L_list.empty()) {
        throw config_error(std::string(source_name) + ": node m_list/L_list must be non-empty");
    }
    if (!(cfg.w_min < cfg.w_max)) {
        throw config_error(std::string(source_name) + ": requires w_min < w_max");
    }
    if (cfg.kind == ExperimentKind::nn) {
        if (cfg.nn_weights_path.empty() || cfg.nn_dataset_path.empty()) {
            throw config_error(std::string(source_name) +
                               ": nn experiment needs [nn] weights and dataset paths");
        }
        if (cfg.nn_grid.empty()) {
            throw config_error(std::string(source_name) + ": nn experiment needs a node grid");
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "kind=" << to_string(cfg.kind) << ";rows=" << cfg.rows << ";cols=" << cfg.cols
       << ";r_on=" << format_double(cfg.device.r_on_ohm)
       << ";r_off=" << format_double(cfg.device.r_off_ohm)
       << ";levels=" << cfg.device.level_count
       << ";placement=" << static_cast<int>(cfg.device.placement) << ";explicit=";
    for (const double g : cfg.device.explicit_levels) os << format_double(g) << " ";
    os << ";topology=" << static_cast<int>(cfg.topology) << ";node_m=" << cfg.node_m
       << ";m_list=";
    for (const auto m : cfg.m_list) os << m << " ";
    os << ";L_list=";
    for (const auto L : cfg.L_list) os << L << " ";
    os << ";grid=";
    for (const auto& p : cfg.nn_grid) os << p.m << "x" << p.L << " ";
    os << ";read_noise=" << format_double(cfg.nonideal.read_noise_frac)
       << ";var=" << format_double(cfg.nonideal.conductance_var_frac)
       << ";wire=" << cfg.nonideal.wire_enabled << ","
       << format_double(cfg.nonideal.wire_res_mean_ohm) << ","
       << format_double(cfg.nonideal.wire_res_std_ohm)
       << ";drift=" << format_double(cfg.nonideal.boundary_drift_frac)
       << ";instability=" << format_double(cfg.nonideal.read_instability_frac)
       << ";input_noise=" << format_double(cfg.nonideal.input_noise_variance) << ";aging=";
    if (cfg.nonideal.aging) {
        os << static_cast<int>(cfg.nonideal.aging->type) << ","
           << format_double(cfg.nonideal.aging->ratio);
    } else {
        os << "none";
    }
    os << ";w=" << format_double(cfg.w_min) << "," << format_double(cfg.w_max)
       << ";trials=" << cfg.effective_trials() << ";seed=" << cfg.seed << ";ratio_list=";
    for (const double r : cfg.ratio_list) os << format_double(r) << " ";
    os << ";aging_list=";
    for (const double r : cfg.aging_ratio_list) os << format_double(r) << " ";
    os << ";noise_list=";
    for (const double r : cfg.noise_variance_list) os << format_double(r) << " ";
    os << ";var_list=";
    for (const double r : cfg.variability_list) os << format_double(r) << " ";
    os << ";weights=" << cfg.nn_weights_path << ";dataset=" << cfg.nn_dataset_path;
    return os.str();
}

}  // namespace srxbar
