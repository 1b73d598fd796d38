// byzls: run, validate and plot Byzantine-robust distributed SGD experiments.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "byzls/config.hpp"
#include "byzls/metrics.hpp"
#include "byzls/runner.hpp"

namespace {

int cmd_validate(const std::string& path) {
    try {
        const auto experiment = byzls::load_experiment(path);
        experiment.validate();
        std::cout << "ok: " << experiment.rules.size() * experiment.attacks.size() * experiment.seeds.size()
                  << " runs, config hash " << experiment.hash() << '\n';
        return 0;
    } catch (const byzls::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_plot(const std::string& csv_path, const byzls::PlotSelector& selector, const std::string& out_path) {
    try {
        std::ifstream in(csv_path);
        if (!in) throw byzls::Error("cannot open " + csv_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto series = byzls::emit_plot_series(byzls::parse_csv(buf.str()), selector);
        if (out_path.empty()) {
            std::cout << series;
        } else {
            std::ofstream out(out_path);
            if (!(out << series)) throw byzls::Error("cannot write " + out_path);
        }
        return 0;
    } catch (const byzls::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byzantine-robust distributed SGD simulator"};
    app.require_subcommand(1);

    std::string run_config;
    std::string out_dir = "results";
    auto* run = app.add_subcommand("run", "Run the experiment grid described by a config file");
    run->add_option("config", run_config, "Experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "Parse and check a config without running it");
    validate->add_option("config", validate_config, "Experiment config")->required();

    std::string csv_path;
    std::string plot_out;
    std::string partition;
    byzls::PlotSelector selector;
    auto* plot = app.add_subcommand("plot", "Write seed-averaged accuracy curves for one (attack, delta) cell");
    plot->add_option("csv", csv_path, "metrics.csv produced by `run`")->required();
    plot->add_option("--attack", selector.attack, "Attack id")->required();
    plot->add_option("--delta", selector.delta, "Byzantine fraction")->required();
    plot->add_option("--partition", partition, "Partition descriptor, e.g. dirichlet:0.01");
    plot->add_option("--out", plot_out, "Output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (*run) return byzls::run_from_config(run_config, out_dir, std::cerr);
    if (*validate) return cmd_validate(validate_config);
    if (!partition.empty()) selector.partition = partition;
    return cmd_plot(csv_path, selector, plot_out);
}
