#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "byzls/config.hpp"
#include "byzls/metrics.hpp"
#include "byzls/sim.hpp"

namespace byzls {

struct GridRun {
    std::size_t run_id = 0;
    SimConfig cfg;
    std::vector<RoundRecord> records;
    std::optional<std::string> error;  // set when the run aborted
};

struct GridOutput {
    std::vector<GridRun> runs;
    std::string csv;
    nlohmann::json summary;

    [[nodiscard]] bool ok() const;
};

/// Executes every (rule, attack, seed) cell in grid order: rules outermost, seeds innermost.
[[nodiscard]] GridOutput run_grid(const ExperimentFile& experiment, const TrainTest& data, std::ostream* progress);

/// Parses, validates and runs a config file, writing
/// `<out_dir>/<config-hash>/metrics.csv` and `summary.json`. Returns a process
/// exit status: 0 on success, 1 if any run aborted, 2 on config or IO errors.
int run_from_config(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace byzls
