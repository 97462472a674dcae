#include "unlbench/nncore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>

#include "unlbench/errors.hpp"

namespace unlbench::nncore {

void Architecture::validate() const {
    if (input_dim < 1) throw ConfigError("arch.input_dim must be >= 1");
    if (n_classes < 2) throw ConfigError("arch.n_classes must be >= 2");
    for (const int h : hidden) {
        if (h < 1) throw ConfigError("arch.hidden dims must all be >= 1");
    }
}

void TrainConfig::validate() const {
    if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum must be in [0, 1)");
    if (!(l2 >= 0.0)) throw ConfigError("train.l2 must be >= 0");
}

namespace {

// (in, out) pairs for each affine layer.
std::vector<std::pair<int, int>> layer_dims(const Architecture& arch) {
    std::vector<std::pair<int, int>> dims;
    int in = arch.input_dim;
    for (const int h : arch.hidden) {
        dims.emplace_back(in, h);
        in = h;
    }
    dims.emplace_back(in, arch.n_classes);
    return dims;
}

}  // namespace

ModelParams ModelParams::zeros_like(const Architecture& arch) {
    ModelParams p;
    for (const auto& [in, out] : layer_dims(arch)) {
        p.weights.emplace_back(static_cast<std::size_t>(in) * static_cast<std::size_t>(out), 0.0);
        p.biases.emplace_back(static_cast<std::size_t>(out), 0.0);
    }
    return p;
}

std::size_t ModelParams::count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

bool ModelParams::same_shape(const ModelParams& other) const {
    if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) {
        return false;
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].size() != other.weights[l].size()) return false;
        if (biases[l].size() != other.biases[l].size()) return false;
    }
    return true;
}

bool ModelParams::bit_equal(const ModelParams& other) const {
    if (!same_shape(other)) return false;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (std::memcmp(weights[l].data(), other.weights[l].data(),
                        weights[l].size() * sizeof(double)) != 0) {
            return false;
        }
        if (std::memcmp(biases[l].data(), other.biases[l].data(),
                        biases[l].size() * sizeof(double)) != 0) {
            return false;
        }
    }
    return true;
}

Architecture architecture_of(const ModelParams& params) {
    Architecture arch;
    if (params.weights.empty()) throw ConfigError("empty model");
    arch.input_dim = params.layer_in(0);
    for (int l = 0; l + 1 < params.n_layers(); ++l) {
        arch.hidden.push_back(params.layer_out(l));
    }
    arch.n_classes = params.layer_out(params.n_layers() - 1);
    return arch;
}

std::vector<Sample> make_samples(std::span<const LabeledExample> examples, LabelMode mode) {
    std::vector<Sample> samples;
    samples.reserve(examples.size());
    for (const auto& ex : examples) {
        samples.push_back(Sample{ex.features, datagen::label_of(ex, mode)});
    }
    return samples;
}

ModelParams init_params(const Architecture& arch, RngStream& stream) {
    arch.validate();
    ModelParams p = ModelParams::zeros_like(arch);
    const auto dims = layer_dims(arch);
    for (std::size_t l = 0; l < dims.size(); ++l) {
        const double scale = std::sqrt(2.0 / static_cast<double>(dims[l].first));
        auto draws = seedkit::draw_gaussian(stream, p.weights[l].size());
        for (std::size_t k = 0; k < draws.size(); ++k) {
            p.weights[l][k] = scale * draws[k];
        }
    }
    return p;
}

namespace {

void forward_trace_into(const ModelParams& params, std::span<const double> features,
                        ForwardTrace& trace) {
    const int n_layers = params.n_layers();
    if (static_cast<int>(features.size()) != params.layer_in(0)) {
        throw ConfigError("forward: feature dimension mismatch");
    }
    trace.input.assign(features.begin(), features.end());
    trace.pre.resize(static_cast<std::size_t>(n_layers));
    trace.post.resize(static_cast<std::size_t>(n_layers));

    const std::vector<double>* activ = &trace.input;
    for (int l = 0; l < n_layers; ++l) {
        const std::size_t lu = static_cast<std::size_t>(l);
        const int out = params.layer_out(l);
        const int in = params.layer_in(l);
        auto& pre = trace.pre[lu];
        pre.assign(static_cast<std::size_t>(out), 0.0);
        const auto& w = params.weights[lu];
        const auto& b = params.biases[lu];
        for (int o = 0; o < out; ++o) {
            double acc = b[static_cast<std::size_t>(o)];
            const double* row = w.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
            for (int k = 0; k < in; ++k) {
                acc += row[k] * (*activ)[static_cast<std::size_t>(k)];
            }
            pre[static_cast<std::size_t>(o)] = acc;
        }
        auto& post = trace.post[lu];
        post = pre;
        if (l + 1 < n_layers) {
            for (double& v : post) v = v > 0.0 ? v : 0.0;
        }
        activ = &post;
    }
}

}  // namespace

ForwardTrace forward_trace(const ModelParams& params, std::span<const double> features) {
    ForwardTrace trace;
    forward_trace_into(params, features, trace);
    return trace;
}

std::vector<double> forward(const ModelParams& params, std::span<const double> features) {
    ForwardTrace trace;
    forward_trace_into(params, features, trace);
    return std::move(trace.post.back());
}

void backprop_into(const ModelParams& params, const ForwardTrace& trace,
                   std::span<const double> dlogits, ModelParams& grad, double scale) {
    const int n_layers = params.n_layers();
    std::vector<double> delta(dlogits.begin(), dlogits.end());
    for (int l = n_layers - 1; l >= 0; --l) {
        const std::size_t lu = static_cast<std::size_t>(l);
        const int out = params.layer_out(l);
        const int in = params.layer_in(l);
        const std::vector<double>& below =
            l == 0 ? trace.input : trace.post[static_cast<std::size_t>(l - 1)];
        auto& gw = grad.weights[lu];
        auto& gb = grad.biases[lu];
        for (int o = 0; o < out; ++o) {
            const double d = scale * delta[static_cast<std::size_t>(o)];
            gb[static_cast<std::size_t>(o)] += d;
            double* grow = gw.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
            for (int k = 0; k < in; ++k) {
                grow[k] += d * below[static_cast<std::size_t>(k)];
            }
        }
        if (l == 0) break;
        // delta for the layer below: W^T delta, gated by the rectifier.
        std::vector<double> next(static_cast<std::size_t>(in), 0.0);
        const auto& w = params.weights[lu];
        for (int o = 0; o < out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            const double* row = w.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
            for (int k = 0; k < in; ++k) {
                next[static_cast<std::size_t>(k)] += row[k] * d;
            }
        }
        const auto& pre_below = trace.pre[static_cast<std::size_t>(l - 1)];
        for (int k = 0; k < in; ++k) {
            if (!(pre_below[static_cast<std::size_t>(k)] > 0.0)) {
                next[static_cast<std::size_t>(k)] = 0.0;
            }
        }
        delta = std::move(next);
    }
}

std::vector<double> backprop_to_input(const ModelParams& params, const ForwardTrace& trace,
                                      std::span<const double> dlogits) {
    const int n_layers = params.n_layers();
    std::vector<double> delta(dlogits.begin(), dlogits.end());
    for (int l = n_layers - 1; l >= 0; --l) {
        const std::size_t lu = static_cast<std::size_t>(l);
        const int out = params.layer_out(l);
        const int in = params.layer_in(l);
        std::vector<double> next(static_cast<std::size_t>(in), 0.0);
        const auto& w = params.weights[lu];
        for (int o = 0; o < out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            const double* row = w.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
            for (int k = 0; k < in; ++k) {
                next[static_cast<std::size_t>(k)] += row[k] * d;
            }
        }
        if (l > 0) {
            const auto& pre_below = trace.pre[static_cast<std::size_t>(l - 1)];
            for (int k = 0; k < in; ++k) {
                if (!(pre_below[static_cast<std::size_t>(k)] > 0.0)) {
                    next[static_cast<std::size_t>(k)] = 0.0;
                }
            }
        }
        delta = std::move(next);
    }
    return delta;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double zmax = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double total = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        p[k] = std::exp(logits[k] - zmax);
        total += p[k];
    }
    for (double& v : p) v /= total;
    return p;
}

namespace {

// Stable cross-entropy of one traced example; appends dLoss/dlogits to grad.
double ce_example_into(const ModelParams& params, const ForwardTrace& trace, int label,
                       ModelParams& grad, double scale) {
    const auto& logits = trace.post.back();
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (const double z : logits) sum += std::exp(z - zmax);
    const double lse = std::log(sum) + zmax;
    const double loss = lse - logits[static_cast<std::size_t>(label)];

    std::vector<double> dlogits(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        dlogits[k] = std::exp(logits[k] - lse);
    }
    dlogits[static_cast<std::size_t>(label)] -= 1.0;
    backprop_into(params, trace, dlogits, grad, scale);
    return loss;
}

}  // namespace

LossGrad loss_and_grad(const ModelParams& params, std::span<const Sample> batch, double l2) {
    if (batch.empty()) throw MetricError("loss_and_grad: empty batch");
    const int n_classes = params.layer_out(params.n_layers() - 1);

    LossGrad out;
    out.grad = ModelParams::zeros_like(architecture_of(params));
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    ForwardTrace trace;
    for (const Sample& s : batch) {
        if (s.y < 0 || s.y >= n_classes) throw ConfigError("label out of range for model");
        forward_trace_into(params, s.x, trace);
        out.loss += inv_b * ce_example_into(params, trace, s.y, out.grad, inv_b);
    }
    if (l2 > 0.0) {
        double sq = 0.0;
        for (std::size_t l = 0; l < params.weights.size(); ++l) {
            const auto& w = params.weights[l];
            auto& gw = out.grad.weights[l];
            for (std::size_t k = 0; k < w.size(); ++k) {
                sq += w[k] * w[k];
                gw[k] += l2 * w[k];
            }
        }
        out.loss += 0.5 * l2 * sq;
    }
    return out;
}

LossGrad loss_and_grad(const ModelParams& params, std::span<const LabeledExample> batch,
                       LabelMode mode, double l2) {
    const auto samples = make_samples(batch, mode);
    return loss_and_grad(params, samples, l2);
}

void sgd_epochs(ModelParams& params, std::span<const Sample> samples, int epochs,
                double learning_rate, double momentum, double l2, int batch_size,
                RngStream& order_stream) {
    if (samples.empty()) throw ConfigError("sgd: empty training set");
    if (batch_size < 1) throw ConfigError("sgd: batch_size must be >= 1");

    const Architecture arch = architecture_of(params);
    ModelParams velocity = ModelParams::zeros_like(arch);
    ModelParams grad = ModelParams::zeros_like(arch);
    const int n_classes = arch.n_classes;

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);

    ForwardTrace trace;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        order = seedkit::shuffled(order_stream, std::move(order));
        std::size_t begin = 0;
        while (begin < order.size()) {
            const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(batch_size));
            const double inv_b = 1.0 / static_cast<double>(end - begin);
            for (auto& w : grad.weights) std::fill(w.begin(), w.end(), 0.0);
            for (auto& b : grad.biases) std::fill(b.begin(), b.end(), 0.0);
            for (std::size_t k = begin; k < end; ++k) {
                const Sample& s = samples[order[k]];
                if (s.y < 0 || s.y >= n_classes) throw ConfigError("label out of range for model");
                forward_trace_into(params, s.x, trace);
                ce_example_into(params, trace, s.y, grad, inv_b);
            }
            if (l2 > 0.0) {
                for (std::size_t l = 0; l < params.weights.size(); ++l) {
                    const auto& w = params.weights[l];
                    auto& gw = grad.weights[l];
                    for (std::size_t k = 0; k < w.size(); ++k) gw[k] += l2 * w[k];
                }
            }
            for (std::size_t l = 0; l < params.weights.size(); ++l) {
                auto& w = params.weights[l];
                auto& v = velocity.weights[l];
                const auto& g = grad.weights[l];
                for (std::size_t k = 0; k < w.size(); ++k) {
                    v[k] = momentum * v[k] + g[k];
                    w[k] -= learning_rate * v[k];
                }
                auto& b = params.biases[l];
                auto& vb = velocity.biases[l];
                const auto& gb = grad.biases[l];
                for (std::size_t k = 0; k < b.size(); ++k) {
                    vb[k] = momentum * vb[k] + gb[k];
                    b[k] -= learning_rate * vb[k];
                }
            }
            begin = end;
        }
    }
}

ModelParams train(const Architecture& arch, const std::vector<LabeledExample>& train_set,
                  LabelMode mode, const TrainConfig& config, Seed seed) {
    arch.validate();
    config.validate();
    if (train_set.empty()) throw ConfigError("train: empty training set");

    auto init_stream = seedkit::derive_stream(seed, "init");
    ModelParams params = init_params(arch, init_stream);
    const auto samples = make_samples(train_set, mode);
    auto order_stream = seedkit::derive_stream(seed, "order");
    sgd_epochs(params, samples, config.epochs, config.learning_rate, config.momentum,
               config.l2, config.batch_size, order_stream);
    return params;
}

double accuracy(const ModelParams& params, std::span<const LabeledExample> examples,
                LabelMode mode) {
    if (examples.empty()) {
        throw MetricError("accuracy: undefined on an empty example set");
    }
    std::size_t hits = 0;
    ForwardTrace trace;
    for (const auto& ex : examples) {
        forward_trace_into(params, ex.features, trace);
        const auto& logits = trace.post.back();
        std::size_t best = 0;
        for (std::size_t k = 1; k < logits.size(); ++k) {
            if (logits[k] > logits[best]) best = k;  // ties keep the lowest id
        }
        if (static_cast<int>(best) == datagen::label_of(ex, mode)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(examples.size());
}

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x554C4E42u;  // "ULNB"
constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.write(buf, 4);
}

std::uint32_t read_u32(std::istream& in) {
    char buf[4];
    in.read(buf, 4);
    if (!in) throw ConfigError("checkpoint: truncated header");
    std::uint32_t v = 0;
    std::memcpy(&v, buf, 4);
    return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& in, std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw ConfigError("checkpoint: truncated parameter data");
}

}  // namespace

void save_checkpoint(std::ostream& out, const ModelParams& params) {
    const Architecture arch = architecture_of(params);
    write_u32(out, kCheckpointMagic);
    write_u32(out, kCheckpointVersion);
    write_u32(out, static_cast<std::uint32_t>(arch.input_dim));
    write_u32(out, static_cast<std::uint32_t>(params.n_layers()));
    for (int l = 0; l < params.n_layers(); ++l) {
        write_u32(out, static_cast<std::uint32_t>(params.layer_out(l)));
    }
    for (int l = 0; l < params.n_layers(); ++l) {
        write_doubles(out, params.weights[static_cast<std::size_t>(l)]);
        write_doubles(out, params.biases[static_cast<std::size_t>(l)]);
    }
}

ModelParams load_checkpoint(std::istream& in) {
    if (read_u32(in) != kCheckpointMagic) throw ConfigError("checkpoint: bad magic");
    if (read_u32(in) != kCheckpointVersion) throw ConfigError("checkpoint: unsupported version");
    Architecture arch;
    arch.input_dim = static_cast<int>(read_u32(in));
    const int n_layers = static_cast<int>(read_u32(in));
    if (n_layers < 1 || n_layers > 1024) throw ConfigError("checkpoint: bad layer count");
    std::vector<int> outs;
    for (int l = 0; l < n_layers; ++l) outs.push_back(static_cast<int>(read_u32(in)));
    arch.hidden.assign(outs.begin(), outs.end() - 1);
    arch.n_classes = outs.back();
    arch.validate();

    ModelParams params = ModelParams::zeros_like(arch);
    for (int l = 0; l < n_layers; ++l) {
        read_doubles(in, params.weights[static_cast<std::size_t>(l)]);
        read_doubles(in, params.biases[static_cast<std::size_t>(l)]);
    }
    return params;
}

}  // namespace unlbench::nncore
