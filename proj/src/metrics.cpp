#include "byzls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "byzls/error.hpp"

namespace byzls {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_real(const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw Error(fmt::format("csv line {}: bad number '{}'", line_no, s));
    return v;
}

std::uint64_t to_count(const std::string& s, std::size_t line_no) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(fmt::format("csv line {}: bad integer '{}'", line_no, s));
    }
    return std::strtoull(s.c_str(), nullptr, 10);
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        for (double x : xs) out.std += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(out.std / static_cast<double>(xs.size() - 1));
    }
    return out;
}

}  // namespace

std::string format_csv_row(const MetricsRow& r) {
    return fmt::format("{},{},{},{},{},{},{},{},{}", r.run_id, r.rule, r.attack, r.delta, r.partition, r.seed, r.round,
                       r.train_loss, r.test_top1);
}

std::string format_csv(const std::vector<MetricsRow>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += format_csv_row(r);
        out += '\n';
    }
    return out;
}

std::vector<MetricsRow> parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw Error("metrics csv: missing or unexpected header");
    std::vector<MetricsRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 9) throw Error(fmt::format("csv line {}: expected 9 fields, got {}", line_no, f.size()));
        MetricsRow r;
        r.run_id = to_count(f[0], line_no);
        r.rule = f[1];
        r.attack = f[2];
        r.delta = to_real(f[3], line_no);
        r.partition = f[4];
        r.seed = to_count(f[5], line_no);
        r.round = to_count(f[6], line_no);
        r.train_loss = to_real(f[7], line_no);
        r.test_top1 = to_real(f[8], line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json summarize_rows(const std::vector<MetricsRow>& rows) {
    using CellKey = std::tuple<std::string, std::string, double, std::string>;
    struct RunTrace {
        std::uint64_t seed = 0;
        std::size_t last_round = 0;
        double final_top1 = 0.0;
        double best_top1 = -1.0;
    };
    struct Cell {
        std::vector<std::size_t> run_order;
        std::map<std::size_t, RunTrace> runs;
    };
    std::vector<CellKey> cell_order;
    std::map<CellKey, Cell> cells;
    for (const auto& r : rows) {
        const CellKey key{r.rule, r.attack, r.delta, r.partition};
        auto [it, inserted] = cells.try_emplace(key);
        if (inserted) cell_order.push_back(key);
        auto& cell = it->second;
        auto [run_it, new_run] = cell.runs.try_emplace(r.run_id);
        if (new_run) cell.run_order.push_back(r.run_id);
        auto& trace = run_it->second;
        trace.seed = r.seed;
        if (new_run || r.round >= trace.last_round) {
            trace.last_round = r.round;
            trace.final_top1 = r.test_top1;
        }
        trace.best_top1 = std::max(trace.best_top1, r.test_top1);
    }

    nlohmann::json out = nlohmann::json::array();
    for (const auto& key : cell_order) {
        const auto& cell = cells.at(key);
        std::vector<double> finals, bests;
        nlohmann::json seeds = nlohmann::json::array();
        for (auto id : cell.run_order) {
            const auto& t = cell.runs.at(id);
            finals.push_back(t.final_top1);
            bests.push_back(t.best_top1);
            seeds.push_back(t.seed);
        }
        const auto fin = mean_std(finals);
        const auto best = mean_std(bests);
        out.push_back({
            {"rule", std::get<0>(key)},
            {"attack", std::get<1>(key)},
            {"delta", std::get<2>(key)},
            {"partition", std::get<3>(key)},
            {"seeds", seeds},
            {"final_top1_mean", fin.mean},
            {"final_top1_std", fin.std},
            {"best_top1_mean", best.mean},
            {"best_top1_std", best.std},
        });
    }
    return out;
}

std::string emit_plot_series(const std::vector<MetricsRow>& rows, const PlotSelector& sel) {
    std::vector<std::string> rules;
    std::map<std::string, std::map<std::size_t, std::pair<double, std::size_t>>> sums;
    std::vector<std::size_t> round_list;
    for (const auto& r : rows) {
        if (r.attack != sel.attack || std::abs(r.delta - sel.delta) > 1e-12) continue;
        if (sel.partition && r.partition != *sel.partition) continue;
        if (!sums.count(r.rule)) rules.push_back(r.rule);
        auto& cell = sums[r.rule][r.round];
        cell.first += r.test_top1;
        cell.second += 1;
        round_list.push_back(r.round);
    }
    if (rules.empty()) throw Error("plot selection matches no rows");
    std::sort(round_list.begin(), round_list.end());
    round_list.erase(std::unique(round_list.begin(), round_list.end()), round_list.end());

    std::string out = "# round";
    for (const auto& rule : rules) out += " " + rule;
    out += '\n';
    for (auto round : round_list) {
        out += fmt::format("{}", round);
        for (const auto& rule : rules) {
            const auto& per_round = sums.at(rule);
            const auto it = per_round.find(round);
            if (it == per_round.end()) {
                out += " nan";
            } else {
                out += fmt::format(" {}", it->second.first / static_cast<double>(it->second.second));
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace byzls
