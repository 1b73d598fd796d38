#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "byzls/dataset.hpp"
#include "byzls/error.hpp"
#include "byzls/sim.hpp"

namespace byzls {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class DatasetKind { MNIST, FMNIST, Synth };

struct DatasetSource {
    DatasetKind kind = DatasetKind::Synth;
    std::filesystem::path data_dir;
    SynthSpec synth;                       // train split
    std::size_t synth_test_per_class = 100;
};

/// A parsed experiment file: one base SimConfig plus the (rule x attack x seed) grid.
///
/// Format: `key = value` lines, `#` starts a comment, `seed` may repeat, and
/// `rule` / `attack` take comma-separated lists.
struct ExperimentFile {
    DatasetSource dataset;
    SimConfig base;
    std::vector<RuleId> rules;
    std::vector<AttackKind> attacks;
    std::vector<std::uint64_t> seeds;
    std::map<std::string, std::string> entries;  // normalized key -> value text

    /// The concrete configuration of one grid cell and seed.
    [[nodiscard]] SimConfig cell(const RuleId& rule, AttackKind attack, std::uint64_t seed) const;

    /// 16 hex digits identifying the normalized content.
    [[nodiscard]] std::string hash() const;

    /// Checks every grid cell's SimConfig.
    void validate() const;
};

[[nodiscard]] const std::vector<std::string>& known_config_keys();

[[nodiscard]] ExperimentFile parse_experiment(std::string_view text);
[[nodiscard]] ExperimentFile load_experiment(const std::filesystem::path& path);

struct TrainTest {
    LabeledDataset train;
    LabeledDataset test;
};

/// IDX files under data_dir (train-*/t10k-* names) or the synthetic generator.
[[nodiscard]] TrainTest load_dataset(const DatasetSource& source);

}  // namespace byzls
