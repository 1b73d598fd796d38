#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace byzls {

/// Labeled classification samples stored row-major.
struct LabeledDataset {
    std::size_t feature_dim = 0;
    std::size_t num_classes = 0;
    std::vector<double> features;  // size() * feature_dim
    std::vector<int> labels;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] bool empty() const noexcept { return labels.empty(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {features.data() + i * feature_dim, feature_dim};
    }

    /// Throws InvalidArgument unless shapes agree and every label is in [0, num_classes).
    void validate() const;
};

/// Parameters of the Gaussian-blob generator.
struct SynthSpec {
    std::size_t classes = 10;
    std::size_t features = 32;
    std::size_t per_class = 200;
    double spread = 3.0;
    std::uint64_t seed = 0;
};

enum class SynthSplit { Train, Test };

/// Gaussian blobs: class c is centered at a seeded random unit direction scaled
/// by `spread`, with isotropic unit variance. Train and Test splits share the
/// centers and draw samples from separate streams.
[[nodiscard]] LabeledDataset synth_dataset(const SynthSpec& spec, SynthSplit split = SynthSplit::Train);

}  // namespace byzls
