#include "byzls/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "byzls/idx.hpp"
#include "byzls/rng.hpp"

namespace byzls {

namespace {

const std::vector<std::string> kKeys = {
    "dataset", "data_dir", "n", "delta", "rule", "attack", "z", "epsilon", "partition", "beta", "k",
    "model", "hidden", "lr", "momentum", "batch_size", "rounds", "eval_every", "seed", "alpha_t",
    "alpha_b", "bucket_s", "m", "trim_t",
    // synthetic data generator
    "synth_classes", "synth_features", "synth_per_class", "synth_test_per_class", "synth_spread", "synth_seed",
};

const std::set<std::string> kRequired = {"dataset", "n", "rule", "attack", "partition", "rounds", "seed"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (piece.empty()) throw ConfigError(fmt::format("empty item in list '{}'", s));
        out.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_real(const std::string& key, const std::string& text) {
    // Accept plain decimals and simple fractions such as 1/9.
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const double num = parse_real(key, std::string(trim(text.substr(0, slash))));
        const double den = parse_real(key, std::string(trim(text.substr(slash + 1))));
        if (den == 0.0) throw ConfigError(fmt::format("{}: division by zero in '{}'", key, text));
        return num / den;
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
    }
    return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, text));
    }
    errno = 0;
    const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ConfigError(fmt::format("{}: '{}' is out of range", key, text));
    return v;
}

std::filesystem::path idx_path(const std::filesystem::path& dir, const char* name) { return dir / name; }

}  // namespace

const std::vector<std::string>& known_config_keys() { return kKeys; }

ExperimentFile parse_experiment(std::string_view text) {
    ExperimentFile ef;
    std::map<std::string, std::string> values;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
        }
        if (value.empty()) throw ConfigError(fmt::format("line {}: key '{}' has no value", line_no, key));
        if (key == "seed") {
            try {
                ef.seeds.push_back(parse_count(key, value));
            } catch (const ConfigError& e) {
                throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
            }
            continue;
        }
        if (!values.emplace(key, value).second) {
            throw ConfigError(fmt::format("line {}: key '{}' given twice", line_no, key));
        }
    }
    for (const auto& req : kRequired) {
        if (req == "seed" ? ef.seeds.empty() : !values.count(req)) {
            throw ConfigError(fmt::format("missing required key '{}'", req));
        }
    }

    auto get = [&](const char* key) -> const std::string* {
        const auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    };
    auto real = [&](const char* key, double& out) {
        if (const auto* v = get(key)) out = parse_real(key, *v);
    };
    auto count = [&](const char* key, std::size_t& out) {
        if (const auto* v = get(key)) out = static_cast<std::size_t>(parse_count(key, *v));
    };

    try {
        const std::string& dataset = *get("dataset");
        if (dataset == "mnist") {
            ef.dataset.kind = DatasetKind::MNIST;
        } else if (dataset == "fmnist") {
            ef.dataset.kind = DatasetKind::FMNIST;
        } else if (dataset == "synth") {
            ef.dataset.kind = DatasetKind::Synth;
        } else {
            throw ConfigError(fmt::format("dataset: unknown dataset '{}'", dataset));
        }
        if (const auto* dir = get("data_dir")) ef.dataset.data_dir = *dir;
        if (ef.dataset.kind != DatasetKind::Synth && ef.dataset.data_dir.empty()) {
            throw ConfigError("data_dir is required for IDX datasets");
        }
        count("synth_classes", ef.dataset.synth.classes);
        count("synth_features", ef.dataset.synth.features);
        count("synth_per_class", ef.dataset.synth.per_class);
        count("synth_test_per_class", ef.dataset.synth_test_per_class);
        real("synth_spread", ef.dataset.synth.spread);
        if (const auto* v = get("synth_seed")) ef.dataset.synth.seed = parse_count("synth_seed", *v);

        SimConfig& c = ef.base;
        count("n", c.n);
        real("delta", c.delta);
        real("z", c.attack.z);
        real("epsilon", c.attack.epsilon);

        const std::string& part = *get("partition");
        if (part == "iid") {
            c.partition.kind = PartitionKind::IID;
        } else if (part == "dirichlet") {
            c.partition.kind = PartitionKind::Dirichlet;
        } else if (part == "kclass") {
            c.partition.kind = PartitionKind::ClassLimited;
        } else {
            throw ConfigError(fmt::format("partition: unknown partition '{}'", part));
        }
        real("beta", c.partition.beta);
        count("k", c.partition.k);

        if (const auto* v = get("model")) c.model = parse_model(*v);
        count("hidden", c.hidden);
        real("lr", c.lr);
        real("momentum", c.momentum);
        count("batch_size", c.batch_size);
        count("rounds", c.rounds);
        count("eval_every", c.eval_every);
        real("alpha_t", c.ls.alpha_t);
        real("alpha_b", c.ls.alpha_b);
        count("bucket_s", c.agg.bucket_s);
        if (const auto* v = get("m")) c.agg.m = static_cast<std::size_t>(parse_count("m", *v));
        if (const auto* v = get("trim_t")) c.agg.trim_t = static_cast<std::size_t>(parse_count("trim_t", *v));

        for (const auto& r : split_list(*get("rule"))) ef.rules.push_back(RuleId::parse(r));
        for (const auto& a : split_list(*get("attack"))) ef.attacks.push_back(parse_attack(a));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    ef.entries = std::move(values);
    return ef;
}

ExperimentFile load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str());
}

SimConfig ExperimentFile::cell(const RuleId& rule, AttackKind attack, std::uint64_t seed) const {
    SimConfig c = base;
    c.rule = rule;
    c.attack.kind = attack;
    c.seed = seed;
    return c;
}

std::string ExperimentFile::hash() const {
    std::string canon;
    for (const auto& [k, v] : entries) canon += k + "=" + v + "\n";
    for (auto s : seeds) canon += fmt::format("seed={}\n", s);
    return fmt::format("{:016x}", splitmix64(fnv1a64(canon)));
}

void ExperimentFile::validate() const {
    if (rules.empty() || attacks.empty() || seeds.empty()) throw ConfigError("empty experiment grid");
    for (const auto& r : rules) {
        for (auto a : attacks) {
            try {
                cell(r, a, seeds.front()).validate();
            } catch (const Error& e) {
                throw ConfigError(fmt::format("cell (rule={}, attack={}): {}", r.name(), attack_name(a), e.what()));
            }
        }
    }
}

TrainTest load_dataset(const DatasetSource& source) {
    TrainTest out;
    if (source.kind == DatasetKind::Synth) {
        out.train = synth_dataset(source.synth, SynthSplit::Train);
        SynthSpec test_spec = source.synth;
        test_spec.per_class = source.synth_test_per_class;
        out.test = synth_dataset(test_spec, SynthSplit::Test);
        return out;
    }
    const auto& dir = source.data_dir;
    out.train = load_idx_dataset(idx_path(dir, "train-images-idx3-ubyte"), idx_path(dir, "train-labels-idx1-ubyte"));
    out.test = load_idx_dataset(idx_path(dir, "t10k-images-idx3-ubyte"), idx_path(dir, "t10k-labels-idx1-ubyte"));
    const std::size_t classes = std::max(out.train.num_classes, out.test.num_classes);
    out.train.num_classes = out.test.num_classes = classes;
    return out;
}

}  // namespace byzls
