#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "byzls/dataset.hpp"
#include "byzls/grad_core.hpp"

namespace byzls {

enum class ModelKind { Softmax, MLP };

[[nodiscard]] ModelKind parse_model(std::string_view name);
[[nodiscard]] std::string model_name(ModelKind kind);

/// Layer dimensions of a flat parameter vector.
///
/// Softmax: W[classes x input] then b[classes].
/// MLP:     W1[hidden x input], b1[hidden], W2[classes x hidden], b2[classes],
///          with a rectifier on the hidden layer.
struct ModelShape {
    ModelKind kind = ModelKind::Softmax;
    std::size_t input_dim = 0;
    std::size_t hidden = 64;
    std::size_t classes = 0;

    [[nodiscard]] std::size_t param_count() const noexcept;
};

struct ModelParams {
    ModelShape shape;
    GradientVector theta;
};

/// Uniform(-0.05, 0.05) weights and zero biases from the stream (seed, "init").
[[nodiscard]] ModelParams init_params(const ModelShape& shape, std::uint64_t seed);

/// Rows of a dataset used for one forward/backward pass.
struct Batch {
    const LabeledDataset& data;
    std::span<const std::size_t> indices;
};

struct LossAndGradient {
    double loss = 0.0;
    GradientVector gradient;
};

/// Mean cross-entropy over the batch.
[[nodiscard]] double model_forward_loss(const ModelParams& params, const Batch& batch);

/// Gradient of the mean cross-entropy with respect to the flat parameter vector.
[[nodiscard]] GradientVector model_gradient(const ModelParams& params, const Batch& batch);

[[nodiscard]] LossAndGradient model_loss_and_gradient(const ModelParams& params, const Batch& batch);

/// Class scores for one sample.
void model_logits(const ModelParams& params, std::span<const double> x, std::span<double> logits);

/// Argmax class, ties to the lowest index.
[[nodiscard]] std::size_t predict(const ModelParams& params, std::span<const double> x);

/// Fraction of samples whose predicted class equals the label.
[[nodiscard]] double evaluate_top1(const ModelParams& params, const LabeledDataset& test);

/// Mean cross-entropy over an entire dataset.
[[nodiscard]] double dataset_loss(const ModelParams& params, const LabeledDataset& data);

}  // namespace byzls
