#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "byzls/grad_core.hpp"

namespace byzls {

enum class BaseRule { Mean, CM, MKrum, Aksel, TrimmedMean };
enum class RuleVariant { Plain, Bucketing, LS };

/// One of the stable rule identifiers: mean, cm, mkrum, aksel, tmean,
/// cm-buck, mkrum-buck, aksel-buck, cmls, mkls, als.
struct RuleId {
    BaseRule base = BaseRule::Mean;
    RuleVariant variant = RuleVariant::Plain;

    /// Throws InvalidArgument on an unknown identifier.
    [[nodiscard]] static RuleId parse(std::string_view name);
    [[nodiscard]] std::string name() const;

    friend bool operator==(const RuleId&, const RuleId&) = default;
};

[[nodiscard]] const std::vector<std::string>& known_rule_names();

struct AggregatorConfig {
    std::size_t n = 0;
    std::size_t b = 0;                    // declared Byzantine budget
    std::optional<std::size_t> m;         // m-Krum average size, default n - b
    std::size_t bucket_s = 2;
    std::optional<std::size_t> trim_t;    // trimmed-mean count per side, default b

    [[nodiscard]] std::size_t krum_m() const noexcept { return m.value_or(n - b); }
    [[nodiscard]] std::size_t trim() const noexcept { return trim_t.value_or(b); }

    /// Checks 2b < n and the ranges of m, bucket_s and trim_t.
    void validate() const;
};

/// Per-worker robust criterion and the trusted / suspected split, ids ascending.
struct TrustAssessment {
    std::vector<double> criteria;
    std::vector<std::size_t> trusted;
    std::vector<std::size_t> suspected;

    [[nodiscard]] std::size_t size() const noexcept { return criteria.size(); }
    [[nodiscard]] std::vector<bool> trusted_mask() const;
};

struct TradeOffVector {
    std::vector<double> lambda;
};

struct LSConfig {
    double alpha_t = 1.0;
    double alpha_b = 1.0 / 9.0;
    double eps_div = 1e-8;

    void validate() const;
};

GradientVector mean_aggregate(const SubmissionSet& set);
GradientVector cm_aggregate(const SubmissionSet& set);
GradientVector trimmed_mean_aggregate(const SubmissionSet& set, std::size_t trim);

/// s(i) = sum of squared distances from g_i to its n - b - 2 nearest other
/// submissions (ties broken by lower worker index).
std::vector<double> krum_scores(const SubmissionSet& set, std::size_t b);

/// Ids of the m smallest Krum scores (ties by lower id), ascending.
std::vector<std::size_t> mkrum_select(const SubmissionSet& set, std::size_t b, std::size_t m);
GradientVector mkrum_aggregate(const SubmissionSet& set, std::size_t b, std::size_t m);

/// Aksel: mean of the submissions whose squared distance to the coordinate
/// median does not exceed the median of those distances.
GradientVector aksel_aggregate(const SubmissionSet& set);

/// Criteria and split derived from a base rule:
///   mkrum  C_i = Krum score,                  trusted = m smallest scores
///   aksel  C_i = ||g_i - CM||^2,              trusted = {C_i <= median(C)}
///   cm     C_i = ||g_i - CM||^2,              trusted = n - b smallest C_i
TrustAssessment assess_trust(BaseRule rule, const SubmissionSet& set, const AggregatorConfig& cfg);

/// lambda_i proportional to alpha_t / (C_i + eps) on trusted workers and
/// alpha_b / (C_i + eps) on suspected ones, normalized over all n workers.
TradeOffVector ls_weights(const TrustAssessment& assessment, const LSConfig& ls);

struct LSResult {
    GradientVector aggregate;
    TradeOffVector weights;
};

LSResult ls_aggregate(const SubmissionSet& set, const TrustAssessment& assessment, const LSConfig& ls);

/// Byzantine budget handed to the inner rule once n submissions are grouped into buckets.
std::size_t bucketed_budget(std::size_t n, std::size_t bucket_s, std::size_t b);

/// Seeded permutation, mean of each run of `bucket_s` consecutive workers, then
/// the inner base rule over the bucket means.
GradientVector bucketing_wrap(const SubmissionSet& set, std::size_t bucket_s, std::uint64_t seed,
                              BaseRule inner, const AggregatorConfig& cfg);

/// Applies a base rule with the budget and sizes in `cfg`.
GradientVector base_aggregate(BaseRule rule, const SubmissionSet& set, const AggregatorConfig& cfg);

struct AggregateResult {
    GradientVector output;
    std::optional<TradeOffVector> weights;       // LS variants only
    std::optional<TrustAssessment> assessment;   // LS variants only
};

/// Uniform dispatch over every rule identifier. `seed` drives bucketing.
AggregateResult aggregate(const RuleId& rule, const SubmissionSet& set, const AggregatorConfig& cfg,
                          const std::optional<LSConfig>& ls, std::uint64_t seed);

}  // namespace byzls
