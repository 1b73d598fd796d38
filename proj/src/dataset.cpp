#include "byzls/dataset.hpp"

#include <cmath>
#include <random>
#include <string>

#include "byzls/error.hpp"
#include "byzls/rng.hpp"

namespace byzls {

void LabeledDataset::validate() const {
    if (feature_dim == 0) throw InvalidArgument("dataset feature dimension must be >= 1");
    if (num_classes < 2) throw InvalidArgument("dataset needs at least 2 classes");
    if (features.size() != labels.size() * feature_dim) {
        throw InvalidArgument("dataset feature buffer does not match sample count");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
            throw InvalidArgument("sample " + std::to_string(i) + " has label " +
                                  std::to_string(labels[i]) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
        }
    }
}

LabeledDataset synth_dataset(const SynthSpec& spec, SynthSplit split) {
    if (spec.classes < 2) throw InvalidArgument("synthetic dataset needs >= 2 classes");
    if (spec.features < 1) throw InvalidArgument("synthetic dataset needs >= 1 feature");

    std::normal_distribution<double> normal(0.0, 1.0);

    Rng center_rng = make_stream(spec.seed, "synth/centers");
    std::vector<double> centers(spec.classes * spec.features);
    for (std::size_t c = 0; c < spec.classes; ++c) {
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < spec.features; ++k) {
            const double x = normal(center_rng);
            centers[c * spec.features + k] = x;
            norm_sq += x * x;
        }
        const double scale = norm_sq > 0.0 ? spec.spread / std::sqrt(norm_sq) : 0.0;
        for (std::size_t k = 0; k < spec.features; ++k) centers[c * spec.features + k] *= scale;
    }

    Rng sample_rng = make_stream(spec.seed, split == SynthSplit::Train ? "synth/train" : "synth/test");
    LabeledDataset ds;
    ds.feature_dim = spec.features;
    ds.num_classes = spec.classes;
    ds.features.reserve(spec.classes * spec.per_class * spec.features);
    ds.labels.reserve(spec.classes * spec.per_class);
    // Interleave classes so that any prefix is roughly balanced.
    for (std::size_t j = 0; j < spec.per_class; ++j) {
        for (std::size_t c = 0; c < spec.classes; ++c) {
            for (std::size_t k = 0; k < spec.features; ++k) {
                ds.features.push_back(centers[c * spec.features + k] + normal(sample_rng));
            }
            ds.labels.push_back(static_cast<int>(c));
        }
    }
    return ds;
}

}  // namespace byzls
