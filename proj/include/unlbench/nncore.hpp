#ifndef UNLBENCH_NNCORE_HPP
#define UNLBENCH_NNCORE_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include "unlbench/datagen.hpp"
#include "unlbench/seedkit.hpp"

namespace unlbench::nncore {

using datagen::LabeledExample;
using datagen::LabelMode;
using seedkit::RngStream;
using seedkit::Seed;

// Feed-forward rectifier classifier: input -> hidden... -> n_classes logits.
struct Architecture {
    int input_dim = 0;
    std::vector<int> hidden;
    int n_classes = 0;

    void validate() const;  // throws ConfigError
    int n_layers() const { return static_cast<int>(hidden.size()) + 1; }
};

// Per-layer weight matrices (row-major, out x in) and bias vectors, in the
// canonical layer order. Also reused as the container for any per-parameter
// quantity of the same shape (gradients, importance diagonals).
struct ModelParams {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static ModelParams zeros_like(const Architecture& arch);
    std::size_t count() const;
    bool same_shape(const ModelParams& other) const;
    bool bit_equal(const ModelParams& other) const;

    int layer_out(int layer) const { return static_cast<int>(biases[static_cast<std::size_t>(layer)].size()); }
    int layer_in(int layer) const {
        return static_cast<int>(weights[static_cast<std::size_t>(layer)].size() /
                                biases[static_cast<std::size_t>(layer)].size());
    }
    int n_layers() const { return static_cast<int>(weights.size()); }
};

Architecture architecture_of(const ModelParams& params);

struct TrainConfig {
    int epochs = 60;
    int batch_size = 32;
    double learning_rate = 0.1;
    double momentum = 0.9;
    double l2 = 5e-4;

    void validate() const;  // throws ConfigError
};

// (features, integer label) pair used by every SGD path.
struct Sample {
    std::vector<double> x;
    int y = 0;
};

std::vector<Sample> make_samples(std::span<const LabeledExample> examples, LabelMode mode);

// He-scaled Gaussian weights (std = sqrt(2/fan_in)), zero biases. Consumes
// the stream layer by layer in row-major order.
ModelParams init_params(const Architecture& arch, RngStream& stream);

std::vector<double> forward(const ModelParams& params, std::span<const double> features);

// Pre- and post-activation values of one forward pass, kept for backprop.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;   // per layer, length out
    std::vector<std::vector<double>> post;  // rectified, last layer = logits
    std::vector<double> input;
};

ForwardTrace forward_trace(const ModelParams& params, std::span<const double> features);

// grad += scale * dLoss/dparams for a caller-supplied dLoss/dlogits. This is
// the single reverse-mode core behind the loss gradient, the importance
// diagonals and the distillation objective.
void backprop_into(const ModelParams& params, const ForwardTrace& trace,
                   std::span<const double> dlogits, ModelParams& grad, double scale);

// dLoss/dinput for a caller-supplied dLoss/dlogits (error-maximizing noise).
std::vector<double> backprop_to_input(const ModelParams& params, const ForwardTrace& trace,
                                      std::span<const double> dlogits);

// Numerically stable softmax probabilities of a logit vector.
std::vector<double> softmax(std::span<const double> logits);

struct LossGrad {
    double loss = 0.0;
    ModelParams grad;
};

// Mean softmax cross-entropy over the batch plus (l2/2)*||weights||^2, with
// the exact gradient. Batch summation runs in fixed index order.
LossGrad loss_and_grad(const ModelParams& params, std::span<const Sample> batch, double l2);
LossGrad loss_and_grad(const ModelParams& params, std::span<const LabeledExample> batch,
                       LabelMode mode, double l2);

// Mini-batch SGD with momentum; per-epoch order comes from `order_stream`,
// the final partial batch is kept. Mutates params in place.
void sgd_epochs(ModelParams& params, std::span<const Sample> samples, int epochs,
                double learning_rate, double momentum, double l2, int batch_size,
                RngStream& order_stream);

// Full training run: init from derive_stream(seed, "init"), epoch order from
// derive_stream(seed, "order"). Pure function of its arguments.
ModelParams train(const Architecture& arch, const std::vector<LabeledExample>& train_set,
                  LabelMode mode, const TrainConfig& config, Seed seed);

// Fraction of examples whose argmax logit equals the label; argmax ties break
// toward the lowest class id. Empty input raises MetricError.
double accuracy(const ModelParams& params, std::span<const LabeledExample> examples,
                LabelMode mode);

// Bit-exact binary checkpoint (architecture descriptor + raw doubles).
void save_checkpoint(std::ostream& out, const ModelParams& params);
ModelParams load_checkpoint(std::istream& in);

}  // namespace unlbench::nncore

#endif
