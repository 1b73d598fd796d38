#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace byzls {

/// One line of metrics.csv.
struct MetricsRow {
    std::size_t run_id = 0;
    std::string rule;
    std::string attack;
    double delta = 0.0;
    std::string partition;
    std::uint64_t seed = 0;
    std::size_t round = 0;
    double train_loss = 0.0;
    double test_top1 = 0.0;
};

inline constexpr std::string_view kCsvHeader = "run_id,rule,attack,delta,partition,seed,round,train_loss,test_top1";

[[nodiscard]] std::string format_csv_row(const MetricsRow& row);
[[nodiscard]] std::string format_csv(const std::vector<MetricsRow>& rows);

/// Parses a metrics CSV; throws Error on a wrong header or malformed line.
[[nodiscard]] std::vector<MetricsRow> parse_csv(std::string_view text);

/// Final and best top-1 per (rule, attack, delta, partition) cell: mean and
/// sample standard deviation across seeds, computed from the rows alone.
[[nodiscard]] nlohmann::json summarize_rows(const std::vector<MetricsRow>& rows);

struct PlotSelector {
    std::string attack;
    double delta = 0.0;
    std::optional<std::string> partition;
};

/// Whitespace-separated columns: round, then the seed-averaged top-1 of each
/// rule in the selection (in order of first appearance). The first line is a
/// `#` comment naming the columns.
[[nodiscard]] std::string emit_plot_series(const std::vector<MetricsRow>& rows, const PlotSelector& selector);

}  // namespace byzls
