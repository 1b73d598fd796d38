#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "byzls/model.hpp"
#include "oracles.hpp"

namespace fixtures {

struct GradientCheck {
    double relative_error = 0.0;
    bool skipped = false;  // MLP draw too close to a rectifier kink
};

inline byzls::LabeledDataset random_dataset(std::mt19937_64& rng, std::size_t samples, std::size_t dim,
                                            std::size_t classes) {
    std::normal_distribution<double> normal(0.0, 1.0);
    byzls::LabeledDataset ds;
    ds.feature_dim = dim;
    ds.num_classes = classes;
    for (std::size_t i = 0; i < samples * dim; ++i) ds.features.push_back(normal(rng));
    for (std::size_t i = 0; i < samples; ++i) ds.labels.push_back(static_cast<int>(rng() % classes));
    return ds;
}

inline bool near_kink(const byzls::ModelParams& p, const byzls::LabeledDataset& ds, double margin) {
    const auto& s = p.shape;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto x = ds.row(i);
        for (std::size_t h = 0; h < s.hidden; ++h) {
            double z = p.theta[s.hidden * s.input_dim + h];
            for (std::size_t k = 0; k < s.input_dim; ++k) z += p.theta[h * s.input_dim + k] * x[k];
            if (std::abs(z) < margin) return true;
        }
    }
    return false;
}

/// Compares model_gradient against central differences of model_forward_loss
/// on a random small instance.
inline GradientCheck check_gradient(std::mt19937_64& rng, byzls::ModelKind kind) {
    const std::size_t dim = 2 + rng() % 5;
    const std::size_t classes = 2 + rng() % 4;
    const std::size_t samples = 1 + rng() % 6;
    const auto ds = random_dataset(rng, samples, dim, classes);
    byzls::ModelShape shape{kind, dim, 3 + rng() % 5, classes};
    byzls::ModelParams params{shape, byzls::GradientVector(shape.param_count())};
    std::normal_distribution<double> normal(0.0, 0.7);
    for (auto& t : params.theta.values()) t = normal(rng);

    if (kind == byzls::ModelKind::MLP && near_kink(params, ds, 1e-3)) return {0.0, true};

    std::vector<std::size_t> all(samples);
    for (std::size_t i = 0; i < samples; ++i) all[i] = i;
    const byzls::Batch batch{ds, all};
    const auto analytic = byzls::model_gradient(params, batch);
    auto loss_at = [&](const std::vector<double>& theta) {
        byzls::ModelParams p{shape, byzls::GradientVector(theta)};
        return byzls::model_forward_loss(p, batch);
    };
    const auto numeric = oracle::finite_difference(loss_at, params.theta.vec(), 1e-5);
    return {oracle::relative_error(analytic.vec(), numeric), false};
}

}  // namespace fixtures
