#include "byzls/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "byzls/error.hpp"
#include "byzls/rng.hpp"

namespace byzls {

namespace {

struct Offsets {
    std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0;
};

Offsets offsets(const ModelShape& s) {
    Offsets o;
    if (s.kind == ModelKind::Softmax) {
        o.w1 = 0;
        o.b1 = s.classes * s.input_dim;
        return o;
    }
    o.w1 = 0;
    o.b1 = s.hidden * s.input_dim;
    o.w2 = o.b1 + s.hidden;
    o.b2 = o.w2 + s.classes * s.hidden;
    return o;
}

void check_batch(const ModelParams& params, const Batch& batch) {
    if (batch.indices.empty()) throw InvalidArgument("empty batch");
    if (batch.data.feature_dim != params.shape.input_dim) {
        throw InvalidArgument(fmt::format("batch has {} features, model expects {}", batch.data.feature_dim,
                                          params.shape.input_dim));
    }
    if (params.theta.dim() != params.shape.param_count()) {
        throw InvalidArgument("parameter vector does not match model shape");
    }
}

// logits = W x + b for a row-major W[rows x cols].
void affine(const double* w, const double* b, std::span<const double> x, std::size_t rows, double* out) {
    const std::size_t cols = x.size();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        double acc = b[r];
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        out[r] = acc;
    }
}

// In-place softmax; returns log-sum-exp of the input.
double softmax_in_place(std::span<double> z) {
    const double top = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (auto& v : z) {
        v = std::exp(v - top);
        total += v;
    }
    for (auto& v : z) v /= total;
    return top + std::log(total);
}

// Cross-entropy of one sample; optionally accumulates scale * gradient into grad.
double sample_pass(const ModelParams& params, std::span<const double> x, std::size_t label, double scale,
                   double* grad, std::vector<double>& hidden_pre, std::vector<double>& hidden,
                   std::vector<double>& logits) {
    const ModelShape& s = params.shape;
    const Offsets o = offsets(s);
    const double* theta = params.theta.values().data();

    std::span<const double> features = x;
    if (s.kind == ModelKind::MLP) {
        affine(theta + o.w1, theta + o.b1, x, s.hidden, hidden_pre.data());
        for (std::size_t h = 0; h < s.hidden; ++h) hidden[h] = std::max(0.0, hidden_pre[h]);
        features = hidden;
        affine(theta + o.w2, theta + o.b2, features, s.classes, logits.data());
    } else {
        affine(theta + o.w1, theta + o.b1, x, s.classes, logits.data());
    }
    const double raw_label_logit = logits[label];
    const double lse = softmax_in_place(logits);
    const double loss = lse - raw_label_logit;
    if (grad == nullptr) return loss;

    // logits now holds p; dL/dlogit = p - onehot(label).
    logits[label] -= 1.0;
    const std::size_t out_w = s.kind == ModelKind::MLP ? o.w2 : o.w1;
    const std::size_t out_b = s.kind == ModelKind::MLP ? o.b2 : o.b1;
    const std::size_t width = features.size();
    for (std::size_t c = 0; c < s.classes; ++c) {
        const double dz = scale * logits[c];
        double* gw = grad + out_w + c * width;
        for (std::size_t k = 0; k < width; ++k) {
            if (features[k] != 0.0) gw[k] += dz * features[k];
        }
        grad[out_b + c] += dz;
    }
    if (s.kind == ModelKind::MLP) {
        const double* w2 = theta + o.w2;
        for (std::size_t h = 0; h < s.hidden; ++h) {
            if (hidden_pre[h] <= 0.0) continue;
            double dh = 0.0;
            for (std::size_t c = 0; c < s.classes; ++c) dh += w2[c * s.hidden + h] * logits[c];
            dh *= scale;
            double* gw = grad + o.w1 + h * s.input_dim;
            for (std::size_t k = 0; k < s.input_dim; ++k) {
                if (x[k] != 0.0) gw[k] += dh * x[k];
            }
            grad[o.b1 + h] += dh;
        }
    }
    return loss;
}

}  // namespace

ModelKind parse_model(std::string_view name) {
    if (name == "softmax") return ModelKind::Softmax;
    if (name == "mlp") return ModelKind::MLP;
    throw InvalidArgument(fmt::format("unknown model '{}'", name));
}

std::string model_name(ModelKind kind) { return kind == ModelKind::Softmax ? "softmax" : "mlp"; }

std::size_t ModelShape::param_count() const noexcept {
    if (kind == ModelKind::Softmax) return classes * input_dim + classes;
    return hidden * input_dim + hidden + classes * hidden + classes;
}

ModelParams init_params(const ModelShape& shape, std::uint64_t seed) {
    if (shape.input_dim == 0 || shape.classes < 2) throw InvalidArgument("model needs inputs and >= 2 classes");
    if (shape.kind == ModelKind::MLP && shape.hidden == 0) throw InvalidArgument("MLP hidden width must be >= 1");
    ModelParams p{shape, GradientVector(shape.param_count())};
    Rng rng = make_stream(seed, "init");
    std::uniform_real_distribution<double> unif(-0.05, 0.05);
    const Offsets o = offsets(shape);
    auto fill = [&](std::size_t begin, std::size_t count) {
        for (std::size_t k = begin; k < begin + count; ++k) p.theta[k] = unif(rng);
    };
    if (shape.kind == ModelKind::Softmax) {
        fill(o.w1, shape.classes * shape.input_dim);
    } else {
        fill(o.w1, shape.hidden * shape.input_dim);
        fill(o.w2, shape.classes * shape.hidden);
    }
    return p;
}

double model_forward_loss(const ModelParams& params, const Batch& batch) {
    check_batch(params, batch);
    const ModelShape& s = params.shape;
    std::vector<double> hidden_pre(s.hidden), hidden(s.hidden), logits(s.classes);
    double total = 0.0;
    for (std::size_t idx : batch.indices) {
        const auto label = static_cast<std::size_t>(batch.data.labels.at(idx));
        total += sample_pass(params, batch.data.row(idx), label, 0.0, nullptr, hidden_pre, hidden, logits);
    }
    return total / static_cast<double>(batch.indices.size());
}

LossAndGradient model_loss_and_gradient(const ModelParams& params, const Batch& batch) {
    check_batch(params, batch);
    const ModelShape& s = params.shape;
    std::vector<double> hidden_pre(s.hidden), hidden(s.hidden), logits(s.classes);
    LossAndGradient out{0.0, GradientVector(s.param_count())};
    const double scale = 1.0 / static_cast<double>(batch.indices.size());
    double* grad = out.gradient.values().data();
    for (std::size_t idx : batch.indices) {
        const auto label = static_cast<std::size_t>(batch.data.labels.at(idx));
        out.loss += sample_pass(params, batch.data.row(idx), label, scale, grad, hidden_pre, hidden, logits);
    }
    out.loss *= scale;
    return out;
}

GradientVector model_gradient(const ModelParams& params, const Batch& batch) {
    return model_loss_and_gradient(params, batch).gradient;
}

void model_logits(const ModelParams& params, std::span<const double> x, std::span<double> logits) {
    const ModelShape& s = params.shape;
    if (x.size() != s.input_dim || logits.size() != s.classes) throw InvalidArgument("logit buffer shape mismatch");
    const Offsets o = offsets(s);
    const double* theta = params.theta.values().data();
    if (s.kind == ModelKind::Softmax) {
        affine(theta + o.w1, theta + o.b1, x, s.classes, logits.data());
        return;
    }
    std::vector<double> hidden(s.hidden);
    affine(theta + o.w1, theta + o.b1, x, s.hidden, hidden.data());
    for (auto& h : hidden) h = std::max(0.0, h);
    affine(theta + o.w2, theta + o.b2, hidden, s.classes, logits.data());
}

std::size_t predict(const ModelParams& params, std::span<const double> x) {
    std::vector<double> logits(params.shape.classes);
    model_logits(params, x, logits);
    return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double evaluate_top1(const ModelParams& params, const LabeledDataset& test) {
    if (test.empty()) throw InvalidArgument("empty test set");
    if (test.feature_dim != params.shape.input_dim) throw InvalidArgument("test set feature dimension mismatch");
    std::vector<double> logits(params.shape.classes);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        model_logits(params, test.row(i), logits);
        const auto best = static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (best == static_cast<std::size_t>(test.labels[i])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

double dataset_loss(const ModelParams& params, const LabeledDataset& data) {
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return model_forward_loss(params, Batch{data, all});
}

}  // namespace byzls
