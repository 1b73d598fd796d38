#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "byzls/aggregators.hpp"
#include "byzls/attacks.hpp"
#include "byzls/dataset.hpp"
#include "byzls/model.hpp"
#include "byzls/partition.hpp"
#include "byzls/rng.hpp"

namespace byzls {

/// Full description of one training run.
///
/// `agg.n`, `agg.b`, `attack.byzantine_ids` and `partition.seed` are derived
/// from `n`, `delta` and `seed` when the simulation starts.
struct SimConfig {
    std::size_t n = 25;
    double delta = 0.0;
    RuleId rule;
    AttackConfig attack;
    PartitionSpec partition;
    ModelKind model = ModelKind::Softmax;
    std::size_t hidden = 64;
    double lr = 0.01;
    double momentum = 0.9;
    std::size_t batch_size = 128;
    std::size_t rounds = 300;
    std::size_t eval_every = 10;
    std::uint64_t seed = 0;
    LSConfig ls;
    AggregatorConfig agg;

    /// b = round(delta * n); throws unless delta * n is integral.
    [[nodiscard]] std::size_t byzantine_count() const;
    void validate() const;
};

struct LambdaSummary {
    double min = 0.0;
    double max = 0.0;
    double trusted_mass = 0.0;
};

struct RoundRecord {
    std::size_t round = 0;    // rounds completed, starting at 1
    double train_loss = 0.0;  // mean minibatch loss of the honest workers this round
    double test_top1 = 0.0;
    bool evaluated = false;   // test_top1 is only meaningful on evaluation rounds
    std::optional<LambdaSummary> lambda;
};

enum class WorkerRole { Honest, Byzantine };

/// A worker's private state: shard, momentum buffer and batching stream.
class WorkerState {
public:
    WorkerState(std::size_t id, DataShard shard, std::size_t dim, WorkerRole role, std::uint64_t seed);

    [[nodiscard]] std::size_t id() const noexcept { return id_; }
    [[nodiscard]] WorkerRole role() const noexcept { return role_; }
    [[nodiscard]] const DataShard& shard() const noexcept { return shard_; }
    [[nodiscard]] const GradientVector& momentum_buffer() const noexcept { return buffer_; }

    /// Indices of the next minibatch (clamped to the shard size), reshuffling at epoch end.
    std::vector<std::size_t> next_batch(std::size_t batch_size);

    /// buffer <- momentum * buffer + gradient; returns the new buffer.
    const GradientVector& accumulate(const GradientVector& gradient, double momentum);

private:
    std::size_t id_;
    DataShard shard_;
    GradientVector buffer_;
    WorkerRole role_;
    Rng rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

struct WorkerStep {
    GradientVector submission;
    double loss = 0.0;
};

/// Samples a batch, computes the gradient at `params` and folds it into the momentum buffer.
[[nodiscard]] WorkerStep worker_step(WorkerState& ws, const ModelParams& params, const LabeledDataset& train,
                                     std::size_t batch_size, double momentum);

/// Synchronous parameter-server training loop.
class Simulation {
public:
    Simulation(SimConfig cfg, const LabeledDataset& train, const LabeledDataset& test);

    /// One round: worker steps, attack, aggregation, parameter update, and
    /// evaluation when the round is an evaluation round.
    RoundRecord run_round();

    [[nodiscard]] const SimConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] const std::vector<WorkerState>& workers() const noexcept { return workers_; }
    [[nodiscard]] std::optional<std::size_t> victim() const noexcept { return victim_; }
    [[nodiscard]] std::size_t rounds_done() const noexcept { return round_; }
    [[nodiscard]] const GradientVector& last_aggregate() const noexcept { return last_aggregate_; }

private:
    bool is_eval_round(std::size_t round) const noexcept;

    SimConfig cfg_;
    const LabeledDataset& train_;
    const LabeledDataset& test_;
    ModelParams params_;
    std::vector<WorkerState> workers_;
    std::optional<std::size_t> victim_;
    std::size_t round_ = 0;
    GradientVector last_aggregate_;
};

/// Runs cfg.rounds rounds and returns the evaluation-round records.
[[nodiscard]] std::vector<RoundRecord> run_experiment(const SimConfig& cfg, const LabeledDataset& train,
                                                      const LabeledDataset& test);

struct RoundStats {
    std::size_t round = 0;
    double top1_mean = 0.0;
    double top1_std = 0.0;
    double loss_mean = 0.0;
    double loss_std = 0.0;
};

/// Repeats the experiment for every seed (cfg.seed is replaced).
[[nodiscard]] std::vector<std::vector<RoundRecord>> run_seeds(SimConfig cfg, const std::vector<std::uint64_t>& seeds,
                                                              const LabeledDataset& train, const LabeledDataset& test);

/// Per-round mean and sample standard deviation across seeds.
[[nodiscard]] std::vector<RoundStats> summarize_seeds(const std::vector<std::vector<RoundRecord>>& runs);

}  // namespace byzls
