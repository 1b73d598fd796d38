#include "byzls/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "byzls/error.hpp"
#include "byzls/rng.hpp"

namespace byzls {

namespace {

std::vector<DataShard> empty_shards(std::size_t n) {
    std::vector<DataShard> shards(n);
    for (std::size_t i = 0; i < n; ++i) shards[i].owner = i;
    return shards;
}

void require_workers(const LabeledDataset& ds, std::size_t n) {
    if (n == 0) throw InvalidArgument("partition needs at least one worker");
    if (n > ds.size()) {
        throw InvalidArgument(fmt::format("cannot split {} samples across {} workers", ds.size(), n));
    }
}

std::vector<std::vector<std::size_t>> indices_by_label(const LabeledDataset& ds) {
    std::vector<std::vector<std::size_t>> by_label(ds.num_classes);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        by_label[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    }
    return by_label;
}

// Dir(beta * 1_n) sample. Uses Gamma(beta) = Gamma(beta + 1) * U^(1/beta) in log
// space so that tiny concentrations do not underflow to an all-zero draw.
std::vector<double> sample_dirichlet(Rng& rng, std::size_t n, double beta) {
    std::gamma_distribution<double> gamma(beta + 1.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> logs(n);
    for (auto& lg : logs) {
        double u = unif(rng);
        while (u <= 0.0) u = unif(rng);
        lg = std::log(gamma(rng)) + std::log(u) / beta;
    }
    const double top = *std::max_element(logs.begin(), logs.end());
    std::vector<double> p(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = std::exp(logs[i] - top);
        total += p[i];
    }
    for (auto& x : p) x /= total;
    return p;
}

// Integer counts summing to `total` proportional to `p`; leftover units go to the
// largest fractional parts, ties to the lower index.
std::vector<std::size_t> largest_remainder(const std::vector<double>& p, std::size_t total) {
    const std::size_t n = p.size();
    std::vector<std::size_t> counts(n);
    std::vector<double> frac(n);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double exact = p[i] * static_cast<double>(total);
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        frac[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t j = 0; assigned < total; j = (j + 1) % n, ++assigned) counts[order[j]] += 1;
    // sum(p) may exceed 1 by rounding error.
    while (assigned > total) {
        auto it = std::max_element(counts.begin(), counts.end());
        --*it;
        --assigned;
    }
    return counts;
}

// Moves one sample at a time from the largest shard (lowest id on ties) into
// each empty shard.
void repair_empty(std::vector<DataShard>& shards) {
    for (auto& target : shards) {
        if (!target.indices.empty()) continue;
        auto donor = std::max_element(shards.begin(), shards.end(), [](const DataShard& a, const DataShard& b) {
            return a.indices.size() < b.indices.size();
        });
        if (donor->indices.size() < 2) throw InvalidArgument("not enough samples to give every worker one");
        target.indices.push_back(donor->indices.back());
        donor->indices.pop_back();
    }
}

void finalize(std::vector<DataShard>& shards) {
    for (auto& s : shards) std::sort(s.indices.begin(), s.indices.end());
}

}  // namespace

std::string PartitionSpec::describe() const {
    switch (kind) {
        case PartitionKind::IID: return "iid";
        case PartitionKind::Dirichlet: return fmt::format("dirichlet:{}", beta);
        case PartitionKind::ClassLimited: return fmt::format("kclass:{}", k);
    }
    return "unknown";
}

std::vector<DataShard> partition_iid(const LabeledDataset& ds, std::size_t n, std::uint64_t seed) {
    require_workers(ds, n);
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_stream(seed, "partition/iid");
    std::shuffle(order.begin(), order.end(), rng);
    auto shards = empty_shards(n);
    for (std::size_t j = 0; j < order.size(); ++j) shards[j % n].indices.push_back(order[j]);
    finalize(shards);
    return shards;
}

std::vector<DataShard> partition_dirichlet(const LabeledDataset& ds, std::size_t n, double beta,
                                           std::uint64_t seed) {
    require_workers(ds, n);
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("Dirichlet beta must be positive");
    Rng rng = make_stream(seed, "partition/dirichlet");
    auto shards = empty_shards(n);
    for (auto& members : indices_by_label(ds)) {
        std::shuffle(members.begin(), members.end(), rng);
        const auto p = sample_dirichlet(rng, n, beta);
        const auto counts = largest_remainder(p, members.size());
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < counts[i]; ++j) shards[i].indices.push_back(members[cursor++]);
        }
    }
    repair_empty(shards);
    finalize(shards);
    return shards;
}

std::vector<DataShard> partition_k_classes(const LabeledDataset& ds, std::size_t n, std::size_t k,
                                           std::uint64_t seed) {
    require_workers(ds, n);
    const std::size_t classes = ds.num_classes;
    if (k < 1 || k > classes) {
        throw InvalidArgument(fmt::format("labels per worker must be in [1, {}], got {}", classes, k));
    }
    if (n * k < classes) {
        throw InvalidArgument(fmt::format("{} workers x {} labels cannot cover {} classes", n, k, classes));
    }
    Rng rng = make_stream(seed, "partition/kclass");
    std::vector<std::size_t> label_order(classes);
    std::iota(label_order.begin(), label_order.end(), 0);
    std::shuffle(label_order.begin(), label_order.end(), rng);

    // Worker i takes k consecutive entries of the cyclic label order, which keeps
    // its labels distinct and spreads ownership within one worker of even.
    std::vector<std::vector<std::size_t>> owners(classes);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) owners[label_order[(i * k + j) % classes]].push_back(i);
    }

    auto shards = empty_shards(n);
    auto by_label = indices_by_label(ds);
    for (std::size_t c = 0; c < classes; ++c) {
        auto& members = by_label[c];
        std::shuffle(members.begin(), members.end(), rng);
        const std::size_t owner_count = owners[c].size();
        const std::size_t base = members.size() / owner_count;
        const std::size_t extra = members.size() % owner_count;
        std::size_t cursor = 0;
        for (std::size_t o = 0; o < owner_count; ++o) {
            const std::size_t take = base + (o < extra ? 1 : 0);
            for (std::size_t j = 0; j < take; ++j) shards[owners[c][o]].indices.push_back(members[cursor++]);
        }
    }
    repair_empty(shards);
    finalize(shards);
    return shards;
}

std::vector<DataShard> make_partition(const LabeledDataset& ds, std::size_t n, const PartitionSpec& spec) {
    switch (spec.kind) {
        case PartitionKind::IID: return partition_iid(ds, n, spec.seed);
        case PartitionKind::Dirichlet: return partition_dirichlet(ds, n, spec.beta, spec.seed);
        case PartitionKind::ClassLimited: return partition_k_classes(ds, n, spec.k, spec.seed);
    }
    throw InvalidArgument("unknown partition kind");
}

double label_entropy(const DataShard& shard, const LabeledDataset& ds) {
    if (shard.indices.empty()) throw InvalidArgument("entropy of an empty shard");
    std::vector<std::size_t> counts(ds.num_classes, 0);
    for (std::size_t idx : shard.indices) counts[static_cast<std::size_t>(ds.labels.at(idx))] += 1;
    const double total = static_cast<double>(shard.indices.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace byzls
