#include "unlbench/unlearners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "unlbench/errors.hpp"
#include "unlbench/textio.hpp"

namespace unlbench::unlearners {

const char* to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::retrain: return "retrain";
        case MethodKind::random_labels: return "random_labels";
        case MethodKind::unsir: return "unsir";
        case MethodKind::bad_teacher: return "bad_teacher";
        case MethodKind::ssd: return "ssd";
        case MethodKind::lfssd: return "lfssd";
    }
    throw ConfigError("unknown unlearning method kind");
}

MethodKind method_kind_from_string(const std::string& s) {
    if (s == "retrain") return MethodKind::retrain;
    if (s == "random_labels") return MethodKind::random_labels;
    if (s == "unsir") return MethodKind::unsir;
    if (s == "bad_teacher") return MethodKind::bad_teacher;
    if (s == "ssd") return MethodKind::ssd;
    if (s == "lfssd") return MethodKind::lfssd;
    throw ConfigError("unknown unlearning method '" + s + "'");
}

std::string UnlearnMethod::hyper_description() const {
    using textio::format_double;
    switch (kind) {
        case MethodKind::retrain:
            return "";
        case MethodKind::random_labels:
        case MethodKind::bad_teacher:
            return "epochs_u=" + std::to_string(hyper.epochs_u) +
                   ",lr_u=" + format_double(hyper.lr_u) + ",batch=" + std::to_string(hyper.batch);
        case MethodKind::unsir:
            return "noise_steps=" + std::to_string(hyper.noise_steps) +
                   ",noise_lr=" + format_double(hyper.noise_lr) +
                   ",n_noise=" + std::to_string(hyper.n_noise) +
                   ",impair_epochs=" + std::to_string(hyper.impair_epochs) +
                   ",repair_epochs=" + std::to_string(hyper.repair_epochs) +
                   ",lr_u=" + format_double(hyper.lr_u) + ",batch=" + std::to_string(hyper.batch);
        case MethodKind::ssd:
        case MethodKind::lfssd:
            return "alpha=" + format_double(hyper.alpha) + ",lam=" + format_double(hyper.lam) +
                   ",baseline=" +
                   (hyper.baseline == ImportanceBaseline::full_train ? "full_train" : "retain_only");
    }
    throw ConfigError("unknown unlearning method kind");
}

std::string UnlearnMethod::hyper_digest() const {
    const std::string text = name() + "{" + hyper_description() + "}";
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string digest(16, '0');
    for (int k = 15; k >= 0; --k) {
        digest[static_cast<std::size_t>(k)] = hex[h & 0xF];
        h >>= 4;
    }
    return digest;
}

void UnlearnMethod::validate() const {
    switch (kind) {
        case MethodKind::retrain:
            return;
        case MethodKind::random_labels:
        case MethodKind::bad_teacher:
            if (hyper.epochs_u < 0) throw ConfigError("epochs_u must be >= 0");
            if (!(hyper.lr_u > 0.0)) throw ConfigError("lr_u must be > 0");
            if (hyper.batch < 1) throw ConfigError("batch must be >= 1");
            return;
        case MethodKind::unsir:
            if (hyper.noise_steps < 0) throw ConfigError("noise_steps must be >= 0");
            if (!(hyper.noise_lr > 0.0)) throw ConfigError("noise_lr must be > 0");
            if (hyper.n_noise < 1) throw ConfigError("n_noise must be >= 1");
            if (hyper.impair_epochs < 0) throw ConfigError("impair_epochs must be >= 0");
            if (hyper.repair_epochs < 0) throw ConfigError("repair_epochs must be >= 0");
            if (!(hyper.lr_u > 0.0)) throw ConfigError("lr_u must be > 0");
            if (hyper.batch < 1) throw ConfigError("batch must be >= 1");
            return;
        case MethodKind::ssd:
        case MethodKind::lfssd:
            if (!(hyper.alpha > 0.0)) throw ConfigError("alpha must be > 0");
            if (!(hyper.lam > 0.0)) throw ConfigError("lam must be > 0");
            return;
    }
    throw ConfigError("unknown unlearning method kind");
}

namespace {

using nncore::ForwardTrace;
using nncore::Sample;

// Per-example squared gradient accumulated in fixed order, then averaged.
void accumulate_squared_gradient(const ModelParams& params, const ForwardTrace& trace,
                                 std::span<const double> dlogits, ModelParams& scratch,
                                 ModelParams& accum) {
    for (auto& w : scratch.weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : scratch.biases) std::fill(b.begin(), b.end(), 0.0);
    nncore::backprop_into(params, trace, dlogits, scratch, 1.0);
    for (std::size_t l = 0; l < accum.weights.size(); ++l) {
        for (std::size_t k = 0; k < accum.weights[l].size(); ++k) {
            const double g = scratch.weights[l][k];
            accum.weights[l][k] += g * g;
        }
        for (std::size_t k = 0; k < accum.biases[l].size(); ++k) {
            const double g = scratch.biases[l][k];
            accum.biases[l][k] += g * g;
        }
    }
}

void scale_all(ModelParams& p, double factor) {
    for (auto& w : p.weights) {
        for (double& v : w) v *= factor;
    }
    for (auto& b : p.biases) {
        for (double& v : b) v *= factor;
    }
}

}  // namespace

ImportanceDiagonal importance_diagonal(const ModelParams& params,
                                       std::span<const datagen::LabeledExample> examples,
                                       LabelMode mode, ImportanceSource source) {
    if (examples.empty()) {
        throw MetricError("importance_diagonal: undefined on an empty example set");
    }
    const nncore::Architecture arch = nncore::architecture_of(params);

    ImportanceDiagonal diag;
    diag.source = source;
    diag.values = ModelParams::zeros_like(arch);
    ModelParams scratch = ModelParams::zeros_like(arch);

    std::vector<double> dlogits(static_cast<std::size_t>(arch.n_classes));
    for (const auto& ex : examples) {
        const ForwardTrace trace = nncore::forward_trace(params, ex.features);
        const auto& logits = trace.post.back();
        if (source == ImportanceSource::fisher_loss) {
            const int label = datagen::label_of(ex, mode);
            if (label < 0 || label >= arch.n_classes) {
                throw ConfigError("importance_diagonal: label out of range for model");
            }
            const auto p = nncore::softmax(logits);
            for (std::size_t k = 0; k < p.size(); ++k) dlogits[k] = p[k];
            dlogits[static_cast<std::size_t>(label)] -= 1.0;
        } else {
            for (std::size_t k = 0; k < logits.size(); ++k) dlogits[k] = logits[k];
        }
        accumulate_squared_gradient(params, trace, dlogits, scratch, diag.values);
    }
    scale_all(diag.values, 1.0 / static_cast<double>(examples.size()));
    return diag;
}

ModelParams dampen_parameters(const ModelParams& trained, const ImportanceDiagonal& d_full,
                              const ImportanceDiagonal& d_forget, double alpha, double lam) {
    if (!trained.same_shape(d_full.values) || !trained.same_shape(d_forget.values)) {
        throw ConfigError("dampen_parameters: importance shape mismatch");
    }
    ModelParams out = trained;
    auto apply = [&](std::vector<double>& dst, const std::vector<double>& full,
                     const std::vector<double>& fgt) {
        for (std::size_t k = 0; k < dst.size(); ++k) {
            if (fgt[k] > alpha * full[k]) {
                const double beta = std::min(lam * full[k] / fgt[k], 1.0);
                dst[k] *= beta;
            }
        }
    };
    for (std::size_t l = 0; l < out.weights.size(); ++l) {
        apply(out.weights[l], d_full.values.weights[l], d_forget.values.weights[l]);
        apply(out.biases[l], d_full.values.biases[l], d_forget.values.biases[l]);
    }
    return out;
}

ModelParams retrain(const ForgetSplit& split, const Architecture& arch,
                    const TrainConfig& config, Seed seed) {
    if (split.retain_train.empty()) throw ConfigError("retrain: empty retain set");
    return nncore::train(arch, split.retain_train, split.label_mode, config, seed);
}

int resample_excluding(seedkit::RngStream& stream, int true_label, int n_classes) {
    if (n_classes < 2) throw ConfigError("resample_excluding: needs at least 2 classes");
    const auto draw = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(n_classes - 1)));
    return draw >= true_label ? draw + 1 : draw;
}

ModelParams random_labels(const ModelParams& trained, const ForgetSplit& split,
                          const Architecture& arch, Seed seed, const UnlearnHyper& hyper) {
    if (split.forget_train.empty()) throw ConfigError("random_labels: empty forget set");
    if (arch.n_classes < 2) throw ConfigError("random_labels: needs at least 2 classes");

    ModelParams params = trained;
    auto label_stream = seedkit::derive_stream(seed, "labels");
    auto order_stream = seedkit::derive_stream(seed, "order");

    std::vector<Sample> samples =
        nncore::make_samples(split.forget_train, split.label_mode);
    const std::size_t n_forget = samples.size();
    const auto retain = nncore::make_samples(split.retain_train, split.label_mode);
    samples.insert(samples.end(), retain.begin(), retain.end());

    std::vector<int> true_labels(n_forget);
    for (std::size_t k = 0; k < n_forget; ++k) true_labels[k] = samples[k].y;

    for (int epoch = 0; epoch < hyper.epochs_u; ++epoch) {
        for (std::size_t k = 0; k < n_forget; ++k) {
            samples[k].y = resample_excluding(label_stream, true_labels[k], arch.n_classes);
        }
        nncore::sgd_epochs(params, samples, 1, hyper.lr_u, /*momentum=*/0.0, /*l2=*/0.0,
                           hyper.batch, order_stream);
    }
    return params;
}

std::vector<std::vector<double>> learn_error_maximizing_noise(const ModelParams& trained,
                                                              int forget_label, int n_noise,
                                                              int steps, double step_size,
                                                              seedkit::RngStream& stream) {
    const nncore::Architecture arch = nncore::architecture_of(trained);
    if (forget_label < 0 || forget_label >= arch.n_classes) {
        throw ConfigError("noise learning: forget label out of range");
    }
    std::vector<std::vector<double>> noise;
    noise.reserve(static_cast<std::size_t>(n_noise));
    for (int m = 0; m < n_noise; ++m) {
        noise.push_back(seedkit::draw_gaussian(stream, static_cast<std::size_t>(arch.input_dim)));
    }
    std::vector<double> dlogits(static_cast<std::size_t>(arch.n_classes));
    for (auto& x : noise) {
        for (int step = 0; step < steps; ++step) {
            const ForwardTrace trace = nncore::forward_trace(trained, x);
            const auto p = nncore::softmax(trace.post.back());
            for (std::size_t k = 0; k < p.size(); ++k) dlogits[k] = p[k];
            dlogits[static_cast<std::size_t>(forget_label)] -= 1.0;
            const auto dx = nncore::backprop_to_input(trained, trace, dlogits);
            for (std::size_t k = 0; k < x.size(); ++k) {
                x[k] += step_size * dx[k];  // ascend the loss at the forget label
            }
        }
    }
    return noise;
}

ModelParams unsir(const ModelParams& trained, const ForgetSplit& split, const Architecture& arch,
                  Seed seed, const UnlearnHyper& hyper) {
    if (split.target.kind != datagen::ForgetTarget::Kind::full_class ||
        split.label_mode != LabelMode::superclass) {
        throw ConfigError("unsir supports full-class forgetting with superclass labels only");
    }
    if (!trained.same_shape(ModelParams::zeros_like(arch))) {
        throw ConfigError("unsir: trained model does not match the architecture");
    }
    if (split.retain_train.empty()) throw ConfigError("unsir: empty retain set");
    const int forget_label = split.target.id;

    ModelParams params = trained;

    auto noise_stream = seedkit::derive_stream(seed, "noise");
    const auto noise = learn_error_maximizing_noise(trained, forget_label, hyper.n_noise,
                                                    hyper.noise_steps, hyper.noise_lr,
                                                    noise_stream);

    if (hyper.impair_epochs > 0) {
        std::vector<Sample> impair_set = nncore::make_samples(split.retain_train, split.label_mode);
        for (const auto& x : noise) {
            impair_set.push_back(Sample{x, forget_label});
        }
        auto impair_order = seedkit::derive_stream(seed, "impair");
        nncore::sgd_epochs(params, impair_set, hyper.impair_epochs, hyper.lr_u, 0.0, 0.0,
                           hyper.batch, impair_order);
    }
    if (hyper.repair_epochs > 0) {
        const auto repair_set = nncore::make_samples(split.retain_train, split.label_mode);
        auto repair_order = seedkit::derive_stream(seed, "repair");
        nncore::sgd_epochs(params, repair_set, hyper.repair_epochs, hyper.lr_u, 0.0, 0.0,
                           hyper.batch, repair_order);
    }
    return params;
}

double kl_logits(std::span<const double> student_logits, std::span<const double> teacher_logits) {
    const auto log_probs = [](std::span<const double> z) {
        const double zmax = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (const double v : z) sum += std::exp(v - zmax);
        const double lse = std::log(sum) + zmax;
        std::vector<double> lp(z.size());
        for (std::size_t k = 0; k < z.size(); ++k) lp[k] = z[k] - lse;
        return lp;
    };
    const auto ls = log_probs(student_logits);
    const auto lt = log_probs(teacher_logits);
    double kl = 0.0;
    for (std::size_t k = 0; k < ls.size(); ++k) {
        kl += std::exp(ls[k]) * (ls[k] - lt[k]);
    }
    return kl;
}

ModelParams bad_teacher(const ModelParams& trained, const ForgetSplit& split,
                        const Architecture& arch, Seed seed, const UnlearnHyper& hyper) {
    if (split.forget_train.empty()) throw ConfigError("bad_teacher: empty forget set");

    ModelParams student = trained;
    auto bad_stream = seedkit::derive_stream(seed, "bad");
    const ModelParams incompetent = nncore::init_params(arch, bad_stream);
    const ModelParams& competent = trained;

    // Teachers are frozen; cache their log-softmax per example. Forget
    // examples first, then retain, both in split order.
    struct DistillItem {
        const std::vector<double>* x;
        std::vector<double> teacher_log_probs;
        double weight;
    };
    const std::size_t n_forget = split.forget_train.size();
    const std::size_t n_retain = split.retain_train.size();
    const auto n_union = static_cast<double>(n_forget + n_retain);

    const auto teacher_log_probs = [](const ModelParams& teacher, const std::vector<double>& x) {
        const auto logits = nncore::forward(teacher, x);
        const double zmax = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (const double v : logits) sum += std::exp(v - zmax);
        const double lse = std::log(sum) + zmax;
        std::vector<double> lp(logits.size());
        for (std::size_t k = 0; k < logits.size(); ++k) lp[k] = logits[k] - lse;
        return lp;
    };

    std::vector<DistillItem> items;
    items.reserve(n_forget + n_retain);
    for (const auto& ex : split.forget_train) {
        items.push_back(DistillItem{&ex.features, teacher_log_probs(incompetent, ex.features),
                                    n_union / static_cast<double>(n_forget)});
    }
    for (const auto& ex : split.retain_train) {
        items.push_back(DistillItem{&ex.features, teacher_log_probs(competent, ex.features),
                                    n_union / static_cast<double>(n_retain)});
    }

    auto order_stream = seedkit::derive_stream(seed, "order");
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);

    ModelParams grad = ModelParams::zeros_like(arch);
    std::vector<double> dlogits(static_cast<std::size_t>(arch.n_classes));

    for (int epoch = 0; epoch < hyper.epochs_u; ++epoch) {
        order = seedkit::shuffled(order_stream, std::move(order));
        std::size_t begin = 0;
        while (begin < order.size()) {
            const std::size_t end =
                std::min(order.size(), begin + static_cast<std::size_t>(hyper.batch));
            const double inv_b = 1.0 / static_cast<double>(end - begin);
            for (auto& w : grad.weights) std::fill(w.begin(), w.end(), 0.0);
            for (auto& b : grad.biases) std::fill(b.begin(), b.end(), 0.0);
            for (std::size_t k = begin; k < end; ++k) {
                const DistillItem& item = items[order[k]];
                const ForwardTrace trace = nncore::forward_trace(student, *item.x);
                const auto& logits = trace.post.back();
                const double zmax = *std::max_element(logits.begin(), logits.end());
                double sum = 0.0;
                for (const double v : logits) sum += std::exp(v - zmax);
                const double lse = std::log(sum) + zmax;
                // KL(s||t): d/dz_k = s_k * ((log s_k - log t_k) - KL)
                double kl = 0.0;
                for (std::size_t c = 0; c < logits.size(); ++c) {
                    const double log_s = logits[c] - lse;
                    kl += std::exp(log_s) * (log_s - item.teacher_log_probs[c]);
                }
                for (std::size_t c = 0; c < logits.size(); ++c) {
                    const double log_s = logits[c] - lse;
                    dlogits[c] = std::exp(log_s) * ((log_s - item.teacher_log_probs[c]) - kl);
                }
                nncore::backprop_into(student, trace, dlogits, grad, inv_b * item.weight);
            }
            for (std::size_t l = 0; l < student.weights.size(); ++l) {
                auto& w = student.weights[l];
                const auto& gw = grad.weights[l];
                for (std::size_t k = 0; k < w.size(); ++k) w[k] -= hyper.lr_u * gw[k];
                auto& b = student.biases[l];
                const auto& gb = grad.biases[l];
                for (std::size_t k = 0; k < b.size(); ++k) b[k] -= hyper.lr_u * gb[k];
            }
            begin = end;
        }
    }
    return student;
}

namespace {

ModelParams dampen_with_source(const ModelParams& trained, const ForgetSplit& split,
                               const UnlearnHyper& hyper, ImportanceSource source) {
    if (split.forget_train.empty()) throw ConfigError("ssd/lfssd: empty forget set");
    if (!(hyper.alpha > 0.0)) throw ConfigError("ssd/lfssd: alpha must be > 0");
    if (!(hyper.lam > 0.0)) throw ConfigError("ssd/lfssd: lam must be > 0");

    std::vector<datagen::LabeledExample> baseline = split.retain_train;
    if (hyper.baseline == ImportanceBaseline::full_train) {
        baseline.insert(baseline.end(), split.forget_train.begin(), split.forget_train.end());
    }
    if (baseline.empty()) throw ConfigError("ssd/lfssd: empty importance baseline set");

    const auto d_full = importance_diagonal(trained, baseline, split.label_mode, source);
    const auto d_forget = importance_diagonal(trained, split.forget_train, split.label_mode, source);
    return dampen_parameters(trained, d_full, d_forget, hyper.alpha, hyper.lam);
}

}  // namespace

ModelParams ssd(const ModelParams& trained, const ForgetSplit& split, const UnlearnHyper& hyper) {
    return dampen_with_source(trained, split, hyper, ImportanceSource::fisher_loss);
}

ModelParams lfssd(const ModelParams& trained, const ForgetSplit& split, const UnlearnHyper& hyper) {
    return dampen_with_source(trained, split, hyper, ImportanceSource::output_norm);
}

ModelParams unlearn(const UnlearnMethod& method, const ModelParams& trained,
                    const ForgetSplit& split, const Architecture& arch,
                    const TrainConfig& train_config, Seed seed) {
    method.validate();
    if (!trained.same_shape(ModelParams::zeros_like(arch))) {
        throw ConfigError("unlearn: trained model does not match the architecture");
    }
    switch (method.kind) {
        case MethodKind::retrain:
            return retrain(split, arch, train_config, seed);
        case MethodKind::random_labels:
            return random_labels(trained, split, arch, seed, method.hyper);
        case MethodKind::unsir:
            return unsir(trained, split, arch, seed, method.hyper);
        case MethodKind::bad_teacher:
            return bad_teacher(trained, split, arch, seed, method.hyper);
        case MethodKind::ssd:
            return ssd(trained, split, method.hyper);  // seed unused: deterministic
        case MethodKind::lfssd:
            return lfssd(trained, split, method.hyper);  // seed unused: deterministic
    }
    throw ConfigError("unknown unlearning method kind");
}

}  // namespace unlbench::unlearners
