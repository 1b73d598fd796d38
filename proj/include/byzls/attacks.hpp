#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "byzls/grad_core.hpp"

namespace byzls {

enum class AttackKind { None, ALIE, IPM, BitFlip, Mimic };

[[nodiscard]] AttackKind parse_attack(std::string_view name);
[[nodiscard]] std::string attack_name(AttackKind kind);

struct AttackConfig {
    AttackKind kind = AttackKind::None;
    double z = 0.25;        // ALIE strength
    double epsilon = 0.1;   // IPM strength
    std::vector<std::size_t> byzantine_ids;  // ascending

    void validate(std::size_t n) const;
};

/// What an omniscient attacker sees in one round.
struct AttackContext {
    std::vector<GradientVector> honest_submissions;
    std::vector<std::size_t> honest_ids;      // parallel to honest_submissions
    std::vector<GradientVector> own_gradients; // parallel to AttackConfig::byzantine_ids
    std::optional<std::size_t> victim_id;      // Mimic only
    std::size_t round = 0;

    /// Splits a full submission set into the honest view and the Byzantine workers' own vectors.
    [[nodiscard]] static AttackContext from_round(const SubmissionSet& set, const AttackConfig& cfg,
                                                  std::optional<std::size_t> victim, std::size_t round);
};

/// Coordinate-wise mu - z * sigma over the honest submissions (population sigma).
[[nodiscard]] GradientVector alie_attack(const AttackContext& ctx, double z);

/// -epsilon times the mean of the honest submissions.
[[nodiscard]] GradientVector ipm_attack(const AttackContext& ctx, double epsilon);

[[nodiscard]] GradientVector bitflip_attack(const GradientVector& own);

/// Honest worker with the lowest label entropy; ties go to the lowest id.
[[nodiscard]] std::size_t mimic_select_victim(const std::vector<std::pair<std::size_t, double>>& entropies);

/// The victim's current-round submission.
[[nodiscard]] GradientVector mimic_attack(const AttackContext& ctx);

/// Replaces the Byzantine slots of `set` with the attack output; honest slots are untouched.
[[nodiscard]] SubmissionSet apply_attack(const SubmissionSet& set, const AttackConfig& cfg, const AttackContext& ctx);

}  // namespace byzls
