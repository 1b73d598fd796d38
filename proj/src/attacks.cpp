#include "byzls/attacks.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace byzls {

namespace {

void require_honest(const AttackContext& ctx, const char* attack) {
    if (ctx.honest_submissions.empty()) {
        throw InvalidArgument(fmt::format("{} needs at least one honest submission", attack));
    }
}

}  // namespace

AttackKind parse_attack(std::string_view name) {
    if (name == "none") return AttackKind::None;
    if (name == "alie") return AttackKind::ALIE;
    if (name == "ipm") return AttackKind::IPM;
    if (name == "bitflip") return AttackKind::BitFlip;
    if (name == "mimic") return AttackKind::Mimic;
    throw InvalidArgument(fmt::format("unknown attack '{}'", name));
}

std::string attack_name(AttackKind kind) {
    switch (kind) {
        case AttackKind::None: return "none";
        case AttackKind::ALIE: return "alie";
        case AttackKind::IPM: return "ipm";
        case AttackKind::BitFlip: return "bitflip";
        case AttackKind::Mimic: return "mimic";
    }
    return "unknown";
}

void AttackConfig::validate(std::size_t n) const {
    if (!(z >= 0.0)) throw InvalidArgument("ALIE z must be >= 0");
    if (!(epsilon > 0.0)) throw InvalidArgument("IPM epsilon must be > 0");
    for (std::size_t i = 0; i < byzantine_ids.size(); ++i) {
        if (byzantine_ids[i] >= n) throw InvalidArgument(fmt::format("byzantine id {} out of range", byzantine_ids[i]));
        if (i > 0 && byzantine_ids[i] <= byzantine_ids[i - 1]) {
            throw InvalidArgument("byzantine ids must be strictly ascending");
        }
    }
}

AttackContext AttackContext::from_round(const SubmissionSet& set, const AttackConfig& cfg,
                                        std::optional<std::size_t> victim, std::size_t round) {
    cfg.validate(set.size());
    AttackContext ctx;
    ctx.victim_id = victim;
    ctx.round = round;
    std::size_t next_byz = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (next_byz < cfg.byzantine_ids.size() && cfg.byzantine_ids[next_byz] == i) {
            ctx.own_gradients.push_back(set[i]);
            ++next_byz;
        } else {
            ctx.honest_submissions.push_back(set[i]);
            ctx.honest_ids.push_back(i);
        }
    }
    return ctx;
}

GradientVector alie_attack(const AttackContext& ctx, double z) {
    require_honest(ctx, "ALIE");
    const auto& honest = ctx.honest_submissions;
    const double count = static_cast<double>(honest.size());
    const std::size_t d = honest.front().dim();
    GradientVector out(d);
    for (std::size_t k = 0; k < d; ++k) {
        double mu = 0.0;
        for (const auto& g : honest) mu += g[k];
        mu /= count;
        double var = 0.0;
        for (const auto& g : honest) var += (g[k] - mu) * (g[k] - mu);
        out[k] = mu - z * std::sqrt(var / count);
    }
    return out;
}

GradientVector ipm_attack(const AttackContext& ctx, double epsilon) {
    require_honest(ctx, "IPM");
    GradientVector mean = coordinate_mean(SubmissionSet(ctx.honest_submissions));
    return -epsilon * std::move(mean);
}

GradientVector bitflip_attack(const GradientVector& own) { return -1.0 * own; }

std::size_t mimic_select_victim(const std::vector<std::pair<std::size_t, double>>& entropies) {
    if (entropies.empty()) throw InvalidArgument("mimic needs at least one candidate victim");
    auto best = entropies.front();
    for (const auto& e : entropies) {
        if (e.second < best.second || (e.second == best.second && e.first < best.first)) best = e;
    }
    return best.first;
}

GradientVector mimic_attack(const AttackContext& ctx) {
    if (!ctx.victim_id) throw InvalidArgument("mimic attack has no victim");
    const auto it = std::find(ctx.honest_ids.begin(), ctx.honest_ids.end(), *ctx.victim_id);
    if (it == ctx.honest_ids.end()) {
        throw InvalidArgument(fmt::format("mimic victim {} is not an honest worker", *ctx.victim_id));
    }
    return ctx.honest_submissions[static_cast<std::size_t>(it - ctx.honest_ids.begin())];
}

SubmissionSet apply_attack(const SubmissionSet& set, const AttackConfig& cfg, const AttackContext& ctx) {
    cfg.validate(set.size());
    if (cfg.kind == AttackKind::None || cfg.byzantine_ids.empty()) return set;

    std::vector<GradientVector> out = set.vectors();
    std::optional<GradientVector> shared;
    switch (cfg.kind) {
        case AttackKind::ALIE: shared = alie_attack(ctx, cfg.z); break;
        case AttackKind::IPM: shared = ipm_attack(ctx, cfg.epsilon); break;
        case AttackKind::Mimic: shared = mimic_attack(ctx); break;
        case AttackKind::BitFlip:
        case AttackKind::None: break;
    }
    for (std::size_t j = 0; j < cfg.byzantine_ids.size(); ++j) {
        const std::size_t id = cfg.byzantine_ids[j];
        if (shared) {
            out[id] = *shared;
        } else {
            const GradientVector& own = j < ctx.own_gradients.size() ? ctx.own_gradients[j] : set[id];
            out[id] = bitflip_attack(own);
        }
    }
    return SubmissionSet(std::move(out));
}

}  // namespace byzls
