#pragma once

#include <filesystem>

#include "byzls/dataset.hpp"
#include "byzls/error.hpp"

namespace byzls {

/// Failure while reading an IDX image/label pair.
class IdxError : public Error {
public:
    enum class Kind { Io, BadMagic, Truncated, CountMismatch };

    IdxError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Reads an IDX3 image file (magic 0x00000803) and IDX1 label file (magic
/// 0x00000801). Pixels are scaled by 1/255. The class count is 1 + the
/// largest label seen (at least 2).
[[nodiscard]] LabeledDataset load_idx_dataset(const std::filesystem::path& images,
                                              const std::filesystem::path& labels);

}  // namespace byzls
