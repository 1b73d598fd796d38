#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "byzls/dataset.hpp"

namespace byzls {

enum class PartitionKind { IID, Dirichlet, ClassLimited };

struct PartitionSpec {
    PartitionKind kind = PartitionKind::IID;
    double beta = 0.1;       // Dirichlet concentration
    std::size_t k = 3;       // labels per worker for ClassLimited
    std::uint64_t seed = 0;

    /// Short descriptor used in metrics output: "iid", "dirichlet:0.01", "kclass:3".
    [[nodiscard]] std::string describe() const;
};

/// A worker's local subset: indices into the parent dataset, ascending.
struct DataShard {
    std::size_t owner = 0;
    std::vector<std::size_t> indices;
};

[[nodiscard]] std::vector<DataShard> partition_iid(const LabeledDataset& ds, std::size_t n,
                                                   std::uint64_t seed);

/// Per-label Dir(beta) proportions, largest-remainder rounding, then empty-shard repair.
[[nodiscard]] std::vector<DataShard> partition_dirichlet(const LabeledDataset& ds, std::size_t n,
                                                         double beta, std::uint64_t seed);

/// Every worker owns exactly k labels; a label's samples are split evenly among its owners.
[[nodiscard]] std::vector<DataShard> partition_k_classes(const LabeledDataset& ds, std::size_t n,
                                                         std::size_t k, std::uint64_t seed);

[[nodiscard]] std::vector<DataShard> make_partition(const LabeledDataset& ds, std::size_t n,
                                                    const PartitionSpec& spec);

/// Shannon entropy (bits) of the shard's empirical label distribution.
[[nodiscard]] double label_entropy(const DataShard& shard, const LabeledDataset& ds);

}  // namespace byzls
