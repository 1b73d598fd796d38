#include "byzls/idx.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace byzls {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IdxError(IdxError::Kind::Io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t offset) {
    return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
           (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void require_size(const std::filesystem::path& path, std::size_t actual, std::size_t expected,
                  const char* what) {
    if (actual < expected) {
        throw IdxError(IdxError::Kind::Truncated,
                       path.string() + ": truncated " + what + ", expected " +
                           std::to_string(expected) + " bytes, got " + std::to_string(actual));
    }
}

void require_magic(const std::filesystem::path& path, std::uint32_t actual, std::uint32_t expected) {
    if (actual != expected) {
        char msg[96];
        std::snprintf(msg, sizeof msg, ": bad magic 0x%08X, expected 0x%08X", actual, expected);
        throw IdxError(IdxError::Kind::BadMagic, path.string() + msg);
    }
}

}  // namespace

LabeledDataset load_idx_dataset(const std::filesystem::path& images, const std::filesystem::path& labels) {
    const auto img = read_all(images);
    require_size(images, img.size(), 16, "header");
    require_magic(images, read_be32(img, 0), kImageMagic);
    const std::size_t count = read_be32(img, 4);
    const std::size_t rows = read_be32(img, 8);
    const std::size_t cols = read_be32(img, 12);
    const std::size_t dim = rows * cols;
    require_size(images, img.size(), 16 + count * dim, "payload");

    const auto lab = read_all(labels);
    require_size(labels, lab.size(), 8, "header");
    require_magic(labels, read_be32(lab, 0), kLabelMagic);
    const std::size_t label_count = read_be32(lab, 4);
    require_size(labels, lab.size(), 8 + label_count, "payload");

    if (label_count != count) {
        throw IdxError(IdxError::Kind::CountMismatch,
                       "image count " + std::to_string(count) + " does not match label count " +
                           std::to_string(label_count));
    }
    if (dim == 0) throw IdxError(IdxError::Kind::BadMagic, images.string() + ": zero-sized images");

    LabeledDataset ds;
    ds.feature_dim = dim;
    ds.features.resize(count * dim);
    std::transform(img.begin() + 16, img.begin() + 16 + static_cast<std::ptrdiff_t>(count * dim),
                   ds.features.begin(), [](unsigned char px) { return px / 255.0; });
    ds.labels.resize(count);
    int max_label = 1;
    for (std::size_t i = 0; i < count; ++i) {
        ds.labels[i] = lab[8 + i];
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.num_classes = static_cast<std::size_t>(max_label) + 1;
    return ds;
}

}  // namespace byzls
