#include "srxbar/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "srxbar/levels.hpp"

namespace srxbar {

namespace {

const char* kMagic = "MXW1";

TensorShape output_shape(const LayerDef& layer, const TensorShape& in) {
    switch (layer.kind) {
        case LayerDef::Kind::dense:
            if (in.size() != layer.n_in) {
                throw std::invalid_argument("NetworkDef: dense input size mismatch");
            }
            return {1, 1, layer.n_out};
        case LayerDef::Kind::conv2d: {
            if (in.c != layer.c_in || in.h < layer.kh || in.w < layer.kw) {
                throw std::invalid_argument("NetworkDef: conv input shape mismatch");
            }
            const unsigned oh = (in.h - layer.kh) / layer.stride + 1;
            const unsigned ow = (in.w - layer.kw) / layer.stride + 1;
            return {oh, ow, layer.c_out};
        }
        case LayerDef::Kind::mean_pool:
            if (in.h % layer.pool != 0 || in.w % layer.pool != 0) {
                throw std::invalid_argument("NetworkDef: pool does not divide the input");
            }
            return {in.h / layer.pool, in.w / layer.pool, in.c};
        case LayerDef::Kind::relu:
        case LayerDef::Kind::softmax_argmax:
            return in;
    }
    throw std::logic_error("NetworkDef: unknown layer kind");
}

/// Gather conv patches: one row per output position, elements ordered
/// (ky, kx, c) -- row-major within the patch, channel minor. Activations
/// use the matching (y, x, c) layout.
Matrix im2col(std::span<const double> x, const TensorShape& in, const LayerDef& conv) {
    const unsigned oh = (in.h - conv.kh) / conv.stride + 1;
    const unsigned ow = (in.w - conv.kw) / conv.stride + 1;
    Matrix cols(static_cast<std::size_t>(oh) * ow,
                static_cast<std::size_t>(conv.kh) * conv.kw * conv.c_in);
    std::size_t p = 0;
    for (unsigned oy = 0; oy < oh; ++oy) {
        for (unsigned ox = 0; ox < ow; ++ox, ++p) {
            std::size_t e = 0;
            for (unsigned ky = 0; ky < conv.kh; ++ky) {
                for (unsigned kx = 0; kx < conv.kw; ++kx) {
                    const unsigned y = oy * conv.stride + ky;
                    const unsigned xw = ox * conv.stride + kx;
                    for (unsigned c = 0; c < conv.c_in; ++c, ++e) {
                        cols.at(p, e) = x[(static_cast<std::size_t>(y) * in.w + xw) * in.c + c];
                    }
                }
            }
        }
    }
    return cols;
}

std::vector<double> apply_pool(std::span<const double> x, const TensorShape& in, unsigned p) {
    const unsigned oh = in.h / p, ow = in.w / p;
    std::vector<double> out(static_cast<std::size_t>(oh) * ow * in.c);
    const double inv = 1.0 / (static_cast<double>(p) * p);
    for (unsigned oy = 0; oy < oh; ++oy) {
        for (unsigned ox = 0; ox < ow; ++ox) {
            for (unsigned c = 0; c < in.c; ++c) {
                double sum = 0.0;
                for (unsigned dy = 0; dy < p; ++dy) {
                    for (unsigned dx = 0; dx < p; ++dx) {
                        sum += x[(static_cast<std::size_t>(oy * p + dy) * in.w + ox * p + dx) *
                                     in.c +
                                 c];
                    }
                }
                out[(static_cast<std::size_t>(oy) * ow + ox) * in.c + c] = sum * inv;
            }
        }
    }
    return out;
}

int argmax_lowest(std::span<const double> scores) {
    int best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = static_cast<int>(i);
    }
    return best;
}

void validate_network(const NetworkDef& net) {
    if (net.layers.empty() || net.layers.back().kind != LayerDef::Kind::softmax_argmax) {
        throw std::invalid_argument("NetworkDef: must end in softmax_argmax");
    }
    std::size_t parametric = 0;
    TensorShape shape = net.input;
    for (const auto& layer : net.layers) {
        if (layer.kind == LayerDef::Kind::dense) {
            const Matrix& w = net.weights.at(parametric++);
            if (w.rows != layer.n_out || w.cols != layer.n_in) {
                throw std::invalid_argument("NetworkDef: dense weight shape mismatch");
            }
        } else if (layer.kind == LayerDef::Kind::conv2d) {
            const Matrix& w = net.weights.at(parametric++);
            if (w.rows != layer.c_out ||
                w.cols != static_cast<std::size_t>(layer.kh) * layer.kw * layer.c_in) {
                throw std::invalid_argument("NetworkDef: conv weight shape mismatch");
            }
        }
        shape = output_shape(layer, shape);
    }
    if (parametric != net.weights.size()) {
        throw std::invalid_argument("NetworkDef: weight count does not match layer list");
    }
}

}  // namespace

std::vector<double> forward_float_scores(const NetworkDef& net, std::span<const double> input) {
    if (input.size() != net.input.size()) {
        throw std::invalid_argument("forward_float: input size mismatch");
    }
    std::vector<double> act(input.begin(), input.end());
    TensorShape shape = net.input;
    std::size_t parametric = 0;
    for (const auto& layer : net.layers) {
        // validates the layer against the incoming shape before any read
        const TensorShape next = output_shape(layer, shape);
        switch (layer.kind) {
            case LayerDef::Kind::dense: {
                const Matrix& w = net.weights[parametric++];
                std::vector<double> out(layer.n_out);
                for (unsigned o = 0; o < layer.n_out; ++o) {
                    CompensatedSum acc;
                    for (unsigned i = 0; i < layer.n_in; ++i) acc.add(w.at(o, i) * act[i]);
                    out[o] = acc.value();
                }
                act = std::move(out);
                break;
            }
            case LayerDef::Kind::conv2d: {
                const Matrix& w = net.weights[parametric++];
                const Matrix cols = im2col(act, shape, layer);
                std::vector<double> out(cols.rows * layer.c_out);
                for (std::size_t p = 0; p < cols.rows; ++p) {
                    for (unsigned o = 0; o < layer.c_out; ++o) {
                        CompensatedSum acc;
                        for (std::size_t e = 0; e < cols.cols; ++e) {
                            acc.add(w.at(o, e) * cols.at(p, e));
                        }
                        out[p * layer.c_out + o] = acc.value();
                    }
                }
                act = std::move(out);
                break;
            }
            case LayerDef::Kind::relu:
                for (double& a : act) a = std::max(a, 0.0);
                break;
            case LayerDef::Kind::mean_pool:
                act = apply_pool(act, shape, layer.pool);
                break;
            case LayerDef::Kind::softmax_argmax:
                return act;  // argmax of logits; softmax is monotone
        }
        shape = next;
    }
    return act;
}

int forward_float(const NetworkDef& net, std::span<const double> input) {
    return argmax_lowest(forward_float_scores(net, input));
}

double float_accuracy_percent(const NetworkDef& net, const Dataset& data) {
    std::size_t correct = 0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        const std::span<const double> row(data.features.data.data() + s * data.features.cols,
                                          data.features.cols);
        if (forward_float(net, row) == data.labels[s]) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------
// MXW1 container
// ---------------------------------------------------------------------------

NetworkDef load_network_mxw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_network_mxw: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw std::runtime_error("load_network_mxw: bad magic in " + path.string());
    }

    NetworkDef net;
    bool have_input = false;
    std::size_t declared_layers = 0;
    while (std::getline(in, line)) {
        if (line == "end") break;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "layers") {
            ls >> declared_layers;
        } else if (tok == "input") {
            ls >> net.input.h >> net.input.w >> net.input.c;
            have_input = true;
        } else if (tok == "dense") {
            LayerDef l;
            l.kind = LayerDef::Kind::dense;
            ls >> l.n_in >> l.n_out;
            net.layers.push_back(l);
        } else if (tok == "conv2d") {
            LayerDef l;
            l.kind = LayerDef::Kind::conv2d;
            ls >> l.kh >> l.kw >> l.c_in >> l.c_out >> l.stride;
            net.layers.push_back(l);
        } else if (tok == "relu") {
            net.layers.push_back({LayerDef::Kind::relu});
        } else if (tok == "mean_pool") {
            LayerDef l;
            l.kind = LayerDef::Kind::mean_pool;
            ls >> l.pool;
            net.layers.push_back(l);
        } else if (tok == "softmax_argmax") {
            net.layers.push_back({LayerDef::Kind::softmax_argmax});
        } else {
            throw std::runtime_error("load_network_mxw: unknown layer '" + tok + "'");
        }
        if (ls.fail()) {
            throw std::runtime_error("load_network_mxw: malformed header line '" + line + "'");
        }
    }
    if (!have_input || net.layers.size() != declared_layers) {
        throw std::runtime_error("load_network_mxw: header incomplete in " + path.string());
    }

    for (const auto& layer : net.layers) {
        std::size_t rows = 0, cols = 0;
        if (layer.kind == LayerDef::Kind::dense) {
            rows = layer.n_out;
            cols = layer.n_in;
        } else if (layer.kind == LayerDef::Kind::conv2d) {
            rows = layer.c_out;
            cols = static_cast<std::size_t>(layer.kh) * layer.kw * layer.c_in;
        } else {
            continue;
        }
        Matrix w(rows, cols);
        std::vector<float> raw(rows * cols);
        in.read(reinterpret_cast<char*>(raw.data()),
                static_cast<std::streamsize>(raw.size() * sizeof(float)));
        if (in.gcount() != static_cast<std::streamsize>(raw.size() * sizeof(float))) {
            throw std::runtime_error("load_network_mxw: truncated payload in " + path.string());
        }
        std::copy(raw.begin(), raw.end(), w.data.begin());
        net.weights.push_back(std::move(w));
    }
    validate_network(net);
    return net;
}

void save_network_mxw(const std::filesystem::path& path, const NetworkDef& net) {
    validate_network(net);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_network_mxw: cannot open " + path.string());
    out << kMagic << "\n";
    out << "layers " << net.layers.size() << "\n";
    out << "input " << net.input.h << " " << net.input.w << " " << net.input.c << "\n";
    for (const auto& layer : net.layers) {
        switch (layer.kind) {
            case LayerDef::Kind::dense:
                out << "dense " << layer.n_in << " " << layer.n_out << "\n";
                break;
            case LayerDef::Kind::conv2d:
                out << "conv2d " << layer.kh << " " << layer.kw << " " << layer.c_in << " "
                    << layer.c_out << " " << layer.stride << "\n";
                break;
            case LayerDef::Kind::relu:
                out << "relu\n";
                break;
            case LayerDef::Kind::mean_pool:
                out << "mean_pool " << layer.pool << "\n";
                break;
            case LayerDef::Kind::softmax_argmax:
                out << "softmax_argmax\n";
                break;
        }
    }
    out << "end\n";
    for (const auto& w : net.weights) {
        std::vector<float> raw(w.data.begin(), w.data.end());
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size() * sizeof(float)));
    }
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset_csv: cannot open " + path.string());
    Dataset data;
    std::vector<double> values;
    std::string line;
    std::size_t feature_count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> fields;
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::string field =
                line.substr(start, comma == std::string::npos ? comma : comma - start);
            fields.push_back(std::stod(field));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 2) {
            throw std::runtime_error("load_dataset_csv: row needs features plus a label");
        }
        if (feature_count == 0) {
            feature_count = fields.size() - 1;
        } else if (fields.size() - 1 != feature_count) {
            throw std::runtime_error("load_dataset_csv: ragged rows");
        }
        values.insert(values.end(), fields.begin(), fields.end() - 1);
        data.labels.push_back(static_cast<int>(fields.back()));
    }
    data.features.rows = data.labels.size();
    data.features.cols = feature_count;
    data.features.data = std::move(values);
    return data;
}

// ---------------------------------------------------------------------------
// Mapped inference
// ---------------------------------------------------------------------------

MappedNetwork::MappedNetwork(const NetworkDef& net, unsigned m, unsigned L,
                             NodeTopology topology, const DeviceSpec& device_template)
    : net_(&net) {
    validate_network(net);
    DeviceSpec device = device_template;
    device.level_count = L;
    levels_ = derive_levels(device);

    NodeSpec node;
    node.memristors_per_node = m;
    node.topology = topology;
    node.device = device;

    std::size_t parametric = 0;
    for (const auto& layer : net.layers) {
        if (layer.kind != LayerDef::Kind::dense && layer.kind != LayerDef::Kind::conv2d) {
            continue;
        }
        const Matrix& w = net.weights[parametric];
        double w_absmax = 0.0;
        for (const double x : w.data) w_absmax = std::max(w_absmax, std::abs(x));
        if (w_absmax == 0.0) w_absmax = 1.0;  // all-zero layer maps to the floor

        QuantizerTable q = build_quantizer(levels_, m, topology, 0.0, w_absmax);
        // Crossbar orientation: inputs down the rows, outputs across
        // differential column pairs.
        Matrix w_t(w.cols, w.rows);
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t c = 0; c < w.cols; ++c) w_t.at(c, r) = w.at(r, c);
        }
        MappedMatrix mapped = map_matrix(w_t, q, node, /*signed_mapping=*/true);
        mapped.crossbar.set_stream_tag(static_cast<std::uint32_t>(parametric));
        dequant_scale_.push_back(w_absmax / q.g_span());
        quantizers_.push_back(std::move(q));
        mapped_.push_back(std::move(mapped));
        ++parametric;
    }
}

void MappedNetwork::realize(const NonIdealityConfig& cfg, std::uint64_t trial) {
    for (auto& mapped : mapped_) {
        mapped.crossbar.realize(cfg, trial);
    }
}

Matrix MappedNetwork::realized_weights(std::size_t parametric_index) const {
    const MappedMatrix& mapped = mapped_[parametric_index];
    const double scale = dequant_scale_[parametric_index];
    const std::size_t n_in = mapped.crossbar.rows();
    const std::size_t n_out = mapped.crossbar.cols() / 2;
    Matrix w(n_out, n_in);
    for (std::size_t i = 0; i < n_in; ++i) {
        for (std::size_t o = 0; o < n_out; ++o) {
            const double g_pos = mapped.crossbar.node_conductance(i, 2 * o);
            const double g_neg = mapped.crossbar.node_conductance(i, 2 * o + 1);
            w.at(o, i) = (g_pos - g_neg) * scale;
        }
    }
    return w;
}

int MappedNetwork::forward_mapped(std::span<const double> input, const NonIdealityConfig& cfg,
                                  std::uint64_t trial, std::uint64_t sample_tag) const {
    const NetworkDef& net = *net_;
    if (input.size() != net.input.size()) {
        throw std::invalid_argument("forward_mapped: input size mismatch");
    }
    std::vector<double> act(input.begin(), input.end());
    TensorShape shape = net.input;
    std::size_t parametric = 0;

    auto read_columns = [&](const MappedMatrix& mapped, std::span<const double> v,
                            double scale, std::uint64_t read_tag) {
        ReadOptions opts;
        opts.read_tag = (sample_tag << 20) | read_tag;
        const ReadResult rr = noisy_read(mapped.crossbar, v, cfg, trial, opts);
        std::vector<double> y = signed_read_interleaved(rr);
        for (double& x : y) x *= scale;
        return y;
    };

    for (const auto& layer : net.layers) {
        const TensorShape next = output_shape(layer, shape);
        switch (layer.kind) {
            case LayerDef::Kind::dense: {
                const auto y = read_columns(mapped_[parametric], act,
                                            dequant_scale_[parametric], 0);
                act = y;
                ++parametric;
                break;
            }
            case LayerDef::Kind::conv2d: {
                const Matrix cols = im2col(act, shape, layer);
                std::vector<double> out(cols.rows * layer.c_out);
                for (std::size_t p = 0; p < cols.rows; ++p) {
                    const std::span<const double> patch(cols.data.data() + p * cols.cols,
                                                        cols.cols);
                    const auto y = read_columns(mapped_[parametric], patch,
                                                dequant_scale_[parametric], p + 1);
                    std::copy(y.begin(), y.end(), out.begin() + p * layer.c_out);
                }
                act = std::move(out);
                ++parametric;
                break;
            }
            case LayerDef::Kind::relu:
                for (double& a : act) a = std::max(a, 0.0);
                break;
            case LayerDef::Kind::mean_pool:
                act = apply_pool(act, shape, layer.pool);
                break;
            case LayerDef::Kind::softmax_argmax:
                return argmax_lowest(act);
        }
        shape = next;
    }
    return argmax_lowest(act);
}

std::vector<EvalRow> evaluate_grid(const NetworkDef& net, const Dataset& data,
                                   std::span<const NodeGridPoint> grid,
                                   std::span<const double> variability_fracs,
                                   unsigned trials, std::uint64_t seed,
                                   const DeviceSpec& device_template, NodeTopology topology) {
    if (grid.empty() || data.size() == 0) {
        throw std::invalid_argument("evaluate_grid: empty grid or dataset");
    }
    if (trials == 0) {
        throw std::invalid_argument("evaluate_grid: trials must be >= 1");
    }
    const double baseline = float_accuracy_percent(net, data);

    std::vector<EvalRow> rows;
    for (const auto& point : grid) {
        MappedNetwork mapped(net, point.m, point.L, topology, device_template);
        for (const double var : variability_fracs) {
            NonIdealityConfig cfg;
            cfg.read_noise_frac = 0.0;
            cfg.conductance_var_frac = var;
            cfg.master_seed = seed;

            // With no stochastic effect enabled, every trial realizes the
            // same crossbars and draws nothing at read time, so one
            // evaluation stands for all of them.
            const unsigned distinct_trials = var > 0.0 ? trials : 1;
            double accuracy_sum = 0.0;
            for (unsigned t = 0; t < distinct_trials; ++t) {
                mapped.realize(cfg, t);
                std::size_t correct = 0;
                for (std::size_t s = 0; s < data.size(); ++s) {
                    const std::span<const double> row(
                        data.features.data.data() + s * data.features.cols,
                        data.features.cols);
                    if (mapped.forward_mapped(row, cfg, t, s) == data.labels[s]) {
                        ++correct;
                    }
                }
                accuracy_sum +=
                    100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
            }

            EvalRow row;
            row.m = point.m;
            row.L = point.L;
            row.level_count = count_unique_levels(point.m, point.L);
            row.variability_frac = var;
            row.accuracy_percent = accuracy_sum / distinct_trials;
            row.float_baseline_percent = baseline;
            row.trials = trials;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace srxbar
