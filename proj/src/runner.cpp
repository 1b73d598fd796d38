#include "byzls/runner.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

namespace byzls {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw Error("failed writing " + path.string());
}

}  // namespace

bool GridOutput::ok() const {
    for (const auto& r : runs) {
        if (r.error) return false;
    }
    return true;
}

GridOutput run_grid(const ExperimentFile& experiment, const TrainTest& data, std::ostream* progress) {
    experiment.validate();
    GridOutput out;
    std::vector<MetricsRow> rows;
    std::size_t run_id = 0;
    for (const auto& rule : experiment.rules) {
        for (auto attack : experiment.attacks) {
            for (auto seed : experiment.seeds) {
                GridRun run;
                run.run_id = run_id++;
                run.cfg = experiment.cell(rule, attack, seed);
                if (progress) {
                    *progress << fmt::format("[run {}] rule={} attack={} seed={}\n", run.run_id, rule.name(),
                                             attack_name(attack), seed);
                }
                Simulation sim(run.cfg, data.train, data.test);
                try {
                    for (std::size_t r = 0; r < run.cfg.rounds; ++r) {
                        auto rec = sim.run_round();
                        if (rec.evaluated) run.records.push_back(rec);
                    }
                } catch (const Error& e) {
                    run.error = e.what();
                    if (progress) *progress << fmt::format("[run {}] aborted: {}\n", run.run_id, e.what());
                }
                const std::string partition = run.cfg.partition.describe();
                for (const auto& rec : run.records) {
                    rows.push_back({run.run_id, rule.name(), attack_name(attack), run.cfg.delta, partition, seed,
                                    rec.round, rec.train_loss, rec.test_top1});
                }
                out.runs.push_back(std::move(run));
            }
        }
    }
    out.csv = format_csv(rows);

    nlohmann::json aborted = nlohmann::json::array();
    for (const auto& r : out.runs) {
        if (r.error) aborted.push_back({{"run_id", r.run_id}, {"error", *r.error}});
    }
    out.summary = {
        {"config_hash", experiment.hash()},
        {"cells", summarize_rows(parse_csv(out.csv))},
        {"aborted_runs", aborted},
    };
    return out;
}

int run_from_config(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& log) {
    ExperimentFile experiment;
    TrainTest data;
    try {
        experiment = load_experiment(config);
        experiment.validate();
        data = load_dataset(experiment.dataset);
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }

    GridOutput result;
    try {
        result = run_grid(experiment, data, &log);
        const auto dir = out_dir / experiment.hash();
        std::filesystem::create_directories(dir);
        write_file(dir / "metrics.csv", result.csv);
        write_file(dir / "summary.json", result.summary.dump(2) + "\n");
        log << fmt::format("wrote {}\n", (dir / "metrics.csv").string());
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
    return result.ok() ? 0 : 1;
}

}  // namespace byzls
