#ifndef UNLBENCH_UNLEARNERS_HPP
#define UNLBENCH_UNLEARNERS_HPP

#include <span>
#include <string>
#include <vector>

#include "unlbench/datagen.hpp"
#include "unlbench/nncore.hpp"
#include "unlbench/seedkit.hpp"

namespace unlbench::unlearners {

using datagen::ForgetSplit;
using datagen::LabelMode;
using nncore::Architecture;
using nncore::ModelParams;
using nncore::TrainConfig;
using seedkit::Seed;

enum class MethodKind { retrain, random_labels, unsir, bad_teacher, ssd, lfssd };

const char* to_string(MethodKind kind);
MethodKind method_kind_from_string(const std::string& s);  // throws ConfigError

enum class ImportanceSource { fisher_loss, output_norm };
enum class ImportanceBaseline { full_train, retain_only };

// Superset of the per-method knobs; each method reads only its own fields
// (see hyper_digest for the per-method subsets).
struct UnlearnHyper {
    // fine-tuning methods (random_labels, bad_teacher; unsir phases)
    int epochs_u = 5;
    double lr_u = 0.02;
    int batch = 32;
    // unsir
    int noise_steps = 40;
    double noise_lr = 0.1;
    int n_noise = 32;
    int impair_epochs = 1;
    int repair_epochs = 1;
    // ssd / lfssd
    double alpha = 10.0;
    double lam = 1.0;
    ImportanceBaseline baseline = ImportanceBaseline::full_train;
};

struct UnlearnMethod {
    MethodKind kind = MethodKind::retrain;
    UnlearnHyper hyper;

    bool deterministic() const { return kind == MethodKind::ssd || kind == MethodKind::lfssd; }
    std::string name() const { return to_string(kind); }

    // Canonical listing of the fields this method actually uses.
    std::string hyper_description() const;
    // 16-hex FNV-1a of name + hyper_description, carried by every record.
    std::string hyper_digest() const;

    void validate() const;  // throws ConfigError
};

// Per-parameter squared-gradient statistics, same shape as the model.
//   fisher_loss: mean over examples of (d CE(f(x), y) / d theta)^2.
//   output_norm: mean over examples of (d 0.5*||logits||^2 / d theta)^2 (label-free).
struct ImportanceDiagonal {
    ModelParams values;
    ImportanceSource source = ImportanceSource::fisher_loss;
};

ImportanceDiagonal importance_diagonal(const ModelParams& params,
                                       std::span<const datagen::LabeledExample> examples,
                                       LabelMode mode, ImportanceSource source);

// Selective dampening: where d_forget > alpha * d_full, scale the parameter
// by min(lam * d_full / d_forget, 1); leave every other parameter untouched.
ModelParams dampen_parameters(const ModelParams& trained, const ImportanceDiagonal& d_full,
                              const ImportanceDiagonal& d_forget, double alpha, double lam);

// Gold standard: train from scratch on the retain set; ignores the trained model.
ModelParams retrain(const ForgetSplit& split, const Architecture& arch,
                    const TrainConfig& config, Seed seed);

// Uniform draw over the n_classes-1 labels other than true_label.
int resample_excluding(seedkit::RngStream& stream, int true_label, int n_classes);

// Fine-tune on retain (true labels) plus forget with labels resampled each
// epoch uniformly from the classes other than the true one.
ModelParams random_labels(const ModelParams& trained, const ForgetSplit& split,
                          const Architecture& arch, Seed seed, const UnlearnHyper& hyper);

// Error-maximizing inputs for one forget class: Gaussian starts ascended
// against the trained model's loss at the forget label. Exposed so the
// ascent can be inspected directly.
std::vector<std::vector<double>> learn_error_maximizing_noise(const ModelParams& trained,
                                                              int forget_label, int n_noise,
                                                              int steps, double step_size,
                                                              seedkit::RngStream& stream);

// Impair on retain + forget-labeled noise, then repair on retain. Full-class
// targets with superclass labels only.
ModelParams unsir(const ModelParams& trained, const ForgetSplit& split, const Architecture& arch,
                  Seed seed, const UnlearnHyper& hyper);

// KL distillation toward a frozen random net on forget data and toward the
// trained net on retain data.
ModelParams bad_teacher(const ModelParams& trained, const ForgetSplit& split,
                        const Architecture& arch, Seed seed, const UnlearnHyper& hyper);

// Deterministic dampening with loss-gradient importance (ssd) or label-free
// output-norm importance (lfssd). No randomness consumed.
ModelParams ssd(const ModelParams& trained, const ForgetSplit& split, const UnlearnHyper& hyper);
ModelParams lfssd(const ModelParams& trained, const ForgetSplit& split, const UnlearnHyper& hyper);

// KL(softmax(student_logits) || softmax(teacher_logits)), used by bad_teacher.
double kl_logits(std::span<const double> student_logits, std::span<const double> teacher_logits);

// Dispatch by method kind; for ssd/lfssd the seed argument is ignored.
ModelParams unlearn(const UnlearnMethod& method, const ModelParams& trained,
                    const ForgetSplit& split, const Architecture& arch,
                    const TrainConfig& train_config, Seed seed);

}  // namespace unlbench::unlearners

#endif
