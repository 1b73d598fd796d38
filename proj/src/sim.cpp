#include "byzls/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace byzls {

std::size_t SimConfig::byzantine_count() const {
    const double exact = delta * static_cast<double>(n);
    const double rounded = std::round(exact);
    if (std::abs(exact - rounded) > 1e-9) {
        throw InvalidArgument(fmt::format("delta * n = {} is not an integer", exact));
    }
    return static_cast<std::size_t>(rounded);
}

void SimConfig::validate() const {
    if (n == 0) throw InvalidArgument("n must be >= 1");
    if (!(delta >= 0.0 && delta < 0.5)) throw InvalidArgument("delta must be in [0, 0.5)");
    const std::size_t b = byzantine_count();
    if (!(lr > 0.0)) throw InvalidArgument("lr must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum must be in [0, 1)");
    if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
    if (eval_every == 0) throw InvalidArgument("eval_every must be >= 1");
    if (model == ModelKind::MLP && hidden == 0) throw InvalidArgument("hidden must be >= 1");
    ls.validate();

    AggregatorConfig a = agg;
    a.n = n;
    a.b = b;
    a.validate();
    if (rule.base == BaseRule::MKrum) {
        std::size_t count = n;
        std::size_t budget = b;
        if (rule.variant == RuleVariant::Bucketing) {
            count = (n + a.bucket_s - 1) / a.bucket_s;
            budget = bucketed_budget(n, a.bucket_s, b);
        }
        if (count < budget + 3) {
            throw InvalidArgument(fmt::format("{} needs n - b - 2 >= 1 (n={}, b={})", rule.name(), count, budget));
        }
    }
    if (rule == RuleId{BaseRule::TrimmedMean, RuleVariant::Plain} && 2 * a.trim() >= n) {
        throw InvalidArgument("tmean needs 2 * trim_t < n");
    }
}

WorkerState::WorkerState(std::size_t id, DataShard shard, std::size_t dim, WorkerRole role, std::uint64_t seed)
    : id_(id), shard_(std::move(shard)), buffer_(dim), role_(role), rng_(make_stream(seed, "worker", id)),
      order_(shard_.indices) {
    if (order_.empty()) throw InvalidArgument(fmt::format("worker {} has an empty shard", id));
    std::shuffle(order_.begin(), order_.end(), rng_);
}

std::vector<std::size_t> WorkerState::next_batch(std::size_t batch_size) {
    const std::size_t size = std::min(batch_size, order_.size());
    if (cursor_ + size > order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        cursor_ = 0;
    }
    std::vector<std::size_t> batch(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                   order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + size));
    cursor_ += size;
    return batch;
}

const GradientVector& WorkerState::accumulate(const GradientVector& gradient, double momentum) {
    buffer_ *= momentum;
    buffer_ += gradient;
    return buffer_;
}

WorkerStep worker_step(WorkerState& ws, const ModelParams& params, const LabeledDataset& train,
                       std::size_t batch_size, double momentum) {
    const auto batch = ws.next_batch(batch_size);
    auto lg = model_loss_and_gradient(params, Batch{train, batch});
    return {ws.accumulate(lg.gradient, momentum), lg.loss};
}

Simulation::Simulation(SimConfig cfg, const LabeledDataset& train, const LabeledDataset& test)
    : cfg_(std::move(cfg)), train_(train), test_(test) {
    cfg_.validate();
    train_.validate();
    test_.validate();
    if (test_.feature_dim != train_.feature_dim) throw InvalidArgument("train and test feature dimensions differ");

    const std::size_t b = cfg_.byzantine_count();
    cfg_.agg.n = cfg_.n;
    cfg_.agg.b = b;
    cfg_.partition.seed = cfg_.seed;
    cfg_.attack.byzantine_ids.clear();
    for (std::size_t i = cfg_.n - b; i < cfg_.n; ++i) cfg_.attack.byzantine_ids.push_back(i);

    ModelShape shape{cfg_.model, train_.feature_dim, cfg_.hidden, std::max(train_.num_classes, test_.num_classes)};
    params_ = init_params(shape, cfg_.seed);
    last_aggregate_ = GradientVector(shape.param_count());

    auto shards = make_partition(train_, cfg_.n, cfg_.partition);
    workers_.reserve(cfg_.n);
    for (std::size_t i = 0; i < cfg_.n; ++i) {
        const WorkerRole role = i >= cfg_.n - b ? WorkerRole::Byzantine : WorkerRole::Honest;
        workers_.emplace_back(i, std::move(shards[i]), shape.param_count(), role, cfg_.seed);
    }

    if (cfg_.attack.kind == AttackKind::Mimic && b > 0) {
        std::vector<std::pair<std::size_t, double>> entropies;
        for (const auto& w : workers_) {
            if (w.role() == WorkerRole::Honest) entropies.emplace_back(w.id(), label_entropy(w.shard(), train_));
        }
        victim_ = mimic_select_victim(entropies);
    }
}

bool Simulation::is_eval_round(std::size_t round) const noexcept {
    return round % cfg_.eval_every == 0 || round == cfg_.rounds;
}

RoundRecord Simulation::run_round() {
    std::vector<GradientVector> submissions;
    submissions.reserve(workers_.size());
    double honest_loss = 0.0;
    std::size_t honest_count = 0;
    for (auto& w : workers_) {
        auto step = worker_step(w, params_, train_, cfg_.batch_size, cfg_.momentum);
        if (w.role() == WorkerRole::Honest) {
            honest_loss += step.loss;
            ++honest_count;
        }
        submissions.push_back(std::move(step.submission));
    }
    const SubmissionSet raw(std::move(submissions));
    const auto ctx = AttackContext::from_round(raw, cfg_.attack, victim_, round_);
    const SubmissionSet attacked = apply_attack(raw, cfg_.attack, ctx);

    const std::uint64_t round_seed = splitmix64(cfg_.seed ^ splitmix64(round_ + 1));
    auto result = aggregate(cfg_.rule, attacked, cfg_.agg, cfg_.ls, round_seed);
    if (!result.output.all_finite()) {
        throw SimulationError(fmt::format("rule {} produced a non-finite update at round {}", cfg_.rule.name(), round_ + 1));
    }

    auto& theta = params_.theta;
    for (std::size_t k = 0; k < theta.dim(); ++k) theta[k] -= cfg_.lr * result.output[k];
    if (!theta.all_finite()) {
        throw SimulationError(fmt::format("parameters became non-finite at round {} (rule {}, attack {})", round_ + 1,
                                          cfg_.rule.name(), attack_name(cfg_.attack.kind)));
    }
    last_aggregate_ = std::move(result.output);
    ++round_;

    RoundRecord rec;
    rec.round = round_;
    rec.train_loss = honest_count > 0 ? honest_loss / static_cast<double>(honest_count) : 0.0;
    if (is_eval_round(round_)) {
        rec.evaluated = true;
        rec.test_top1 = evaluate_top1(params_, test_);
    }
    if (result.weights && result.assessment) {
        const auto& lam = result.weights->lambda;
        LambdaSummary s;
        s.min = *std::min_element(lam.begin(), lam.end());
        s.max = *std::max_element(lam.begin(), lam.end());
        for (std::size_t i : result.assessment->trusted) s.trusted_mass += lam[i];
        rec.lambda = s;
    }
    return rec;
}

std::vector<RoundRecord> run_experiment(const SimConfig& cfg, const LabeledDataset& train, const LabeledDataset& test) {
    Simulation sim(cfg, train, test);
    std::vector<RoundRecord> out;
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
        auto rec = sim.run_round();
        if (rec.evaluated) out.push_back(rec);
    }
    return out;
}

std::vector<std::vector<RoundRecord>> run_seeds(SimConfig cfg, const std::vector<std::uint64_t>& seeds,
                                                const LabeledDataset& train, const LabeledDataset& test) {
    std::vector<std::vector<RoundRecord>> runs;
    runs.reserve(seeds.size());
    for (auto seed : seeds) {
        cfg.seed = seed;
        runs.push_back(run_experiment(cfg, train, test));
    }
    return runs;
}

std::vector<RoundStats> summarize_seeds(const std::vector<std::vector<RoundRecord>>& runs) {
    std::vector<RoundStats> out;
    if (runs.empty()) return out;
    const std::size_t rows = runs.front().size();
    for (const auto& r : runs) {
        if (r.size() != rows) throw InvalidArgument("runs have different record counts");
    }
    const double count = static_cast<double>(runs.size());
    for (std::size_t j = 0; j < rows; ++j) {
        RoundStats s;
        s.round = runs.front()[j].round;
        for (const auto& r : runs) {
            s.top1_mean += r[j].test_top1;
            s.loss_mean += r[j].train_loss;
        }
        s.top1_mean /= count;
        s.loss_mean /= count;
        if (runs.size() > 1) {
            for (const auto& r : runs) {
                s.top1_std += (r[j].test_top1 - s.top1_mean) * (r[j].test_top1 - s.top1_mean);
                s.loss_std += (r[j].train_loss - s.loss_mean) * (r[j].train_loss - s.loss_mean);
            }
            s.top1_std = std::sqrt(s.top1_std / (count - 1.0));
            s.loss_std = std::sqrt(s.loss_std / (count - 1.0));
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace byzls
