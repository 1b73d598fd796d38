// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "byzls/aggregators.hpp"
#include "byzls/attacks.hpp"
#include "byzls/config.hpp"
#include "byzls/metrics.hpp"
#include "byzls/partition.hpp"
#include "byzls/runner.hpp"
#include "byzls/sim.hpp"
#include "model_fixtures.hpp"
#include "oracles.hpp"

using namespace byzls;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v) {
    std::printf("%s  criterion %2d  %s: %s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
}

Verdict krum_oracle() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    std::size_t selection_mismatch = 0;
    for (int inst = 0; inst < 500; ++inst) {
        const std::size_t n = 4 + rng() % 4;
        const std::size_t b = rng() % (n - 3 + 1);  // n - b - 2 >= 1
        const std::size_t d = 1 + rng() % 4;
        auto rows = oracle::random_rows(rng, n, d);
        if (inst % 5 == 0) rows[rng() % n] = rows[rng() % n];  // exercise ties
        const auto set = oracle::to_set(rows);
        const auto got = krum_scores(set, b);
        const auto want = oracle::krum_scores(rows, b);
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
        const std::size_t m = 1 + rng() % n;
        if (mkrum_select(set, b, m) != oracle::smallest_ids(want, m)) ++selection_mismatch;
    }
    return {worst <= 1e-12 && selection_mismatch == 0,
            fmt::format("500 instances, max score error {:.3g}, selection mismatches {}", worst, selection_mismatch)};
}

Verdict aksel_oracle() {
    std::mt19937_64 rng(202);
    std::size_t mismatches = 0, small_trusted = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n = 1 + rng() % 12;
        const std::size_t d = 1 + rng() % 6;
        auto rows = oracle::random_rows(rng, n, d);
        if (inst % 7 == 0 && n > 2) rows[1] = rows[0];
        const auto set = oracle::to_set(rows);
        const auto steps = oracle::aksel(rows);
        if (aksel_aggregate(set).vec() != steps.output) ++mismatches;
        if (steps.trusted.size() < (n + 1) / 2) ++small_trusted;
        AggregatorConfig cfg;
        cfg.n = n;
        if (assess_trust(BaseRule::Aksel, set, cfg).trusted != steps.trusted) ++mismatches;
    }
    return {mismatches == 0 && small_trusted == 0,
            fmt::format("1000 instances, inexact outputs {}, trusted sets below ceil(n/2) {}", mismatches, small_trusted)};
}

Verdict cm_oracle() {
    std::mt19937_64 rng(303);
    std::size_t mismatches = 0, odd = 0, even = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n = 1 + rng() % 15;
        (n % 2 ? odd : even) += 1;
        const auto rows = oracle::random_rows(rng, n, 1 + rng() % 8);
        if (coordinate_median(oracle::to_set(rows)).vec() != oracle::coordinate_median(rows)) ++mismatches;
    }
    return {mismatches == 0 && odd > 0 && even > 0,
            fmt::format("1000 instances ({} odd n, {} even n), mismatches {}", odd, even, mismatches)};
}

Verdict ls_contract() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unif(0.0, 5.0);
    const LSConfig ls;  // alpha_t = 1, alpha_b = 1/9
    double worst_sum = 0.0, worst_ratio = 0.0;
    std::size_t negative = 0, outside = 0, pairs = 0;
    for (int draw = 0; draw < 1000; ++draw) {
        const std::size_t n = 2 + rng() % 12;
        TrustAssessment a;
        a.criteria.resize(n);
        for (auto& c : a.criteria) c = (rng() % 4 == 0) ? 1.5 : unif(rng);  // repeated values give equal pairs
        for (std::size_t i = 0; i < n; ++i) (rng() % 3 == 0 ? a.suspected : a.trusted).push_back(i);
        if (a.trusted.empty()) {
            a.trusted.push_back(a.suspected.back());
            a.suspected.pop_back();
        }
        std::sort(a.trusted.begin(), a.trusted.end());
        const auto rows = oracle::random_rows(rng, n, 1 + rng() % 5);
        const auto res = ls_aggregate(oracle::to_set(rows), a, ls);
        const auto& lam = res.weights.lambda;
        double sum = 0.0;
        for (double l : lam) {
            sum += l;
            if (l < 0.0) ++negative;
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        for (auto t : a.trusted) {
            for (auto s : a.suspected) {
                if (a.criteria[t] != a.criteria[s]) continue;
                ++pairs;
                worst_ratio = std::max(worst_ratio, std::abs(lam[t] / lam[s] - 9.0));
            }
        }
        for (std::size_t k = 0; k < rows.front().size(); ++k) {
            double lo = rows[0][k], hi = rows[0][k];
            for (const auto& r : rows) {
                lo = std::min(lo, r[k]);
                hi = std::max(hi, r[k]);
            }
            const double slack = 1e-12 * std::max(1.0, std::abs(hi) + std::abs(lo));
            if (res.aggregate[k] < lo - slack || res.aggregate[k] > hi + slack) ++outside;
        }
    }
    return {worst_sum <= 1e-9 && negative == 0 && pairs > 0 && worst_ratio <= 1e-9 && outside == 0,
            fmt::format("1000 draws, max |sum-1| {:.3g}, negative weights {}, {} equal-criterion pairs with max "
                        "|ratio-9| {:.3g}, envelope violations {}",
                        worst_sum, negative, pairs, worst_ratio, outside)};
}

Verdict attack_formulas() {
    std::mt19937_64 rng(505);
    double alie_err = 0.0, ipm_cos_err = 0.0;
    std::size_t mimic_short = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 5 + rng() % 10;
        const std::size_t b = 1 + rng() % ((n - 1) / 2);
        const std::size_t d = 1 + rng() % 6;
        const auto rows = oracle::random_rows(rng, n, d);
        const auto set = oracle::to_set(rows);
        AttackConfig cfg;
        for (std::size_t i = n - b; i < n; ++i) cfg.byzantine_ids.push_back(i);
        const oracle::Matrix honest(rows.begin(), rows.end() - static_cast<std::ptrdiff_t>(b));
        const std::size_t victim = rng() % (n - b);
        const auto ctx = AttackContext::from_round(set, cfg, victim, 0);

        const auto [mu, sd] = oracle::moments(honest);
        const auto alie = alie_attack(ctx, 0.25);
        for (std::size_t k = 0; k < d; ++k) alie_err = std::max(alie_err, std::abs(alie[k] - (mu[k] - 0.25 * sd[k])));

        const auto ipm = ipm_attack(ctx, 0.1);
        const double cosv = dot(ipm, GradientVector(mu)) / std::sqrt(squared_norm(ipm) * squared_norm(GradientVector(mu)));
        ipm_cos_err = std::max(ipm_cos_err, std::abs(cosv + 1.0));

        cfg.kind = AttackKind::Mimic;
        const auto attacked = apply_attack(set, cfg, ctx);
        std::size_t copies = 0;
        for (const auto& g : attacked) copies += (g == set[victim]) ? 1 : 0;
        if (copies < b + 1) ++mimic_short;
    }

    // Three workers: one label only, two balanced labels, four balanced labels.
    LabeledDataset ds;
    ds.feature_dim = 1;
    ds.num_classes = 4;
    for (std::size_t i = 0; i < 16; ++i) {
        ds.features.push_back(0.0);
        ds.labels.push_back(i % 4);
    }
    const std::vector<DataShard> shards = {
        {0, {0, 1, 2, 3, 4, 5, 6, 7}},  // labels 0..3 twice: 2 bits
        {1, {8, 10, 12, 14}},           // labels 0, 2: 1 bit
        {2, {9, 13}},                   // label 1 only: 0 bits
    };
    std::vector<std::pair<std::size_t, double>> ent;
    for (const auto& s : shards) ent.emplace_back(s.owner, label_entropy(s, ds));
    const bool entropy_ok = std::abs(ent[0].second - 2.0) < 1e-12 && std::abs(ent[1].second - 1.0) < 1e-12 &&
                            ent[2].second == 0.0;
    const std::size_t victim = mimic_select_victim(ent);

    return {alie_err <= 1e-12 && ipm_cos_err <= 1e-12 && mimic_short == 0 && entropy_ok && victim == 2,
            fmt::format("ALIE max error {:.3g}, IPM max |cos+1| {:.3g}, Mimic sets short of b+1 copies {}, "
                        "entropies ({:.3g}, {:.3g}, {:.3g}) -> victim {}",
                        alie_err, ipm_cos_err, mimic_short, ent[0].second, ent[1].second, ent[2].second, victim)};
}

Verdict gradient_check() {
    std::mt19937_64 rng(606);
    std::string detail;
    bool ok = true;
    for (auto kind : {ModelKind::Softmax, ModelKind::MLP}) {
        double worst = 0.0;
        int done = 0, tries = 0;
        while (done < 100 && tries < 1000) {
            ++tries;
            const auto r = fixtures::check_gradient(rng, kind);
            if (r.skipped) continue;
            worst = std::max(worst, r.relative_error);
            ++done;
        }
        ok = ok && done == 100 && worst < 1e-4;
        detail += fmt::format("{}{} worst relative error {:.3g} over {} draws", detail.empty() ? "" : ", ",
                              model_name(kind), worst, done);
    }
    return {ok, detail};
}

Verdict determinism() {
    const char* text = R"(
dataset = synth
synth_classes = 4
synth_features = 12
synth_per_class = 60
n = 10
delta = 0.2
rule = als, mkrum-buck
attack = mimic, alie
partition = dirichlet
beta = 0.1
batch_size = 16
rounds = 30
eval_every = 5
seed = 17
seed = 18
)";
    const auto ef = parse_experiment(text);
    const auto data = load_dataset(ef.dataset);
    const auto a = run_grid(ef, data, nullptr);
    const auto b = run_grid(ef, data, nullptr);
    const bool same = a.ok() && b.ok() && a.csv == b.csv && !a.csv.empty();
    return {same, fmt::format("{} runs, {} CSV bytes, identical: {}", a.runs.size(), a.csv.size(),
                              a.csv == b.csv ? "yes" : "no")};
}

// Directional runs on the bundled MNIST subset.

struct Cell {
    std::string rule;
    AttackKind attack;
    double delta;
    PartitionSpec partition;
};

class Bench {
public:
    explicit Bench(TrainTest data) : data_(std::move(data)) {}

    /// Mean final top-1 (percent) over three seeds.
    double final_top1(const Cell& c) {
        PartitionSpec part = c.partition;
        const auto key = fmt::format("{}|{}|{}|{}", c.rule, attack_name(c.attack), c.delta, part.describe());
        if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
        SimConfig cfg;
        cfg.n = 25;
        cfg.delta = c.delta;
        cfg.rule = RuleId::parse(c.rule);
        cfg.attack.kind = c.attack;
        cfg.partition = part;
        cfg.rounds = 300;
        cfg.eval_every = 300;
        const auto start = std::chrono::steady_clock::now();
        double sum = 0.0;
        std::string per_seed;
        for (std::uint64_t seed : {1, 2, 3}) {
            cfg.seed = seed;
            double top1 = 0.0;
            try {
                top1 = 100.0 * run_experiment(cfg, data_.train, data_.test).back().test_top1;
            } catch (const SimulationError& e) {
                std::fprintf(stderr, "  %s seed %llu aborted: %s\n", key.c_str(), static_cast<unsigned long long>(seed),
                             e.what());
            }
            sum += top1;
            per_seed += fmt::format(" {:.1f}", top1);
        }
        const double mean = sum / 3.0;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "  %-40s final top-1 %6.2f (seeds%s) [%.0f s]\n", key.c_str(), mean, per_seed.c_str(), secs);
        cache_[key] = mean;
        return mean;
    }

private:
    TrainTest data_;
    std::map<std::string, double> cache_;
};

PartitionSpec iid() { return {}; }

PartitionSpec dirichlet(double beta) {
    PartitionSpec p;
    p.kind = PartitionKind::Dirichlet;
    p.beta = beta;
    return p;
}

PartitionSpec kclass(std::size_t k) {
    PartitionSpec p;
    p.kind = PartitionKind::ClassLimited;
    p.k = k;
    return p;
}

const std::vector<std::string> kSanityRules = {"mean", "cm", "mkrum", "aksel", "cmls", "mkls", "als"};
const std::vector<std::pair<std::string, std::string>> kLsPairs = {{"cmls", "cm"}, {"mkls", "mkrum"}, {"als", "aksel"}};

Verdict no_attack_sanity(Bench& bench) {
    const double mean_acc = bench.final_top1({"mean", AttackKind::None, 0.0, iid()});
    bool ok = mean_acc >= 85.0;
    std::string detail = fmt::format("mean {:.2f}", mean_acc);
    for (const auto& r : kSanityRules) {
        if (r == "mean") continue;
        const double acc = bench.final_top1({r, AttackKind::None, 0.0, iid()});
        ok = ok && std::abs(acc - mean_acc) <= 2.0 && acc >= 85.0;
        detail += fmt::format(", {} {:.2f}", r, acc);
    }
    return {ok, detail};
}

Verdict bitflip(Bench& bench) {
    bool ok = true;
    std::string detail;
    for (const auto& r : kSanityRules) {
        const double clean = bench.final_top1({r, AttackKind::None, 0.0, iid()});
        const double hit = bench.final_top1({r, AttackKind::BitFlip, 0.2, iid()});
        const double drop = clean - hit;
        ok = ok && (r == "mean" ? drop >= 10.0 : drop <= 3.0);
        detail += fmt::format("{}{} {:.2f}->{:.2f}", detail.empty() ? "" : ", ", r, clean, hit);
    }
    return {ok, detail};
}

Verdict non_iid_ls(Bench& bench) {
    bool ok = true;
    bool any_big = false;
    std::string detail;
    for (auto attack : {AttackKind::ALIE, AttackKind::Mimic}) {
        for (const auto& [ls, base] : kLsPairs) {
            const double a = bench.final_top1({ls, attack, 0.2, dirichlet(0.01)});
            const double b = bench.final_top1({base, attack, 0.2, dirichlet(0.01)});
            ok = ok && a >= b - 1.0;
            any_big = any_big || a >= b + 5.0;
            detail += fmt::format("{}{}: {} {:.2f} vs {} {:.2f}", detail.empty() ? "" : ", ", attack_name(attack), ls,
                                  a, base, b);
        }
    }
    if (!any_big) detail += " (no LS variant ahead by 5 points)";
    return {ok && any_big, detail};
}

Verdict bucketing_compare(Bench& bench) {
    bool ok = true;
    std::string detail;
    for (const auto& [ls, base] : kLsPairs) {
        const double a = bench.final_top1({ls, AttackKind::ALIE, 0.4, kclass(3)});
        const double b = bench.final_top1({base + "-buck", AttackKind::ALIE, 0.4, kclass(3)});
        ok = ok && a >= b - 1.0;
        detail += fmt::format("{}{} {:.2f} vs {}-buck {:.2f}", detail.empty() ? "" : ", ", ls, a, base, b);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    report(1, "Krum scores and m-Krum selection", krum_oracle());
    report(2, "Aksel aggregate and trusted set", aksel_oracle());
    report(3, "coordinate-wise median", cm_oracle());
    report(4, "LS trade-off weights", ls_contract());
    report(5, "attack formulas", attack_formulas());
    report(6, "analytic gradients", gradient_check());
    report(7, "determinism", determinism());

    DatasetSource src;
    src.kind = DatasetKind::MNIST;
    src.data_dir = BYZLS_MNIST_DIR;
    Bench bench(load_dataset(src));
    report(8, "no-attack IID accuracy", no_attack_sanity(bench));
    report(9, "BitFlip at 20%", bitflip(bench));
    report(10, "Dirichlet 0.01 LS vs base at 20%", non_iid_ls(bench));
    report(11, "LS vs bucketing, ALIE at 40% on 3-class shards", bucketing_compare(bench));

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
