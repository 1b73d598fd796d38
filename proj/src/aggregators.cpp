#include "byzls/aggregators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "byzls/rng.hpp"

namespace byzls {

namespace {

struct NamedRule {
    const char* name;
    RuleId id;
};

constexpr std::array<NamedRule, 11> kRules{{
    {"mean", {BaseRule::Mean, RuleVariant::Plain}},
    {"cm", {BaseRule::CM, RuleVariant::Plain}},
    {"mkrum", {BaseRule::MKrum, RuleVariant::Plain}},
    {"aksel", {BaseRule::Aksel, RuleVariant::Plain}},
    {"tmean", {BaseRule::TrimmedMean, RuleVariant::Plain}},
    {"cm-buck", {BaseRule::CM, RuleVariant::Bucketing}},
    {"mkrum-buck", {BaseRule::MKrum, RuleVariant::Bucketing}},
    {"aksel-buck", {BaseRule::Aksel, RuleVariant::Bucketing}},
    {"cmls", {BaseRule::CM, RuleVariant::LS}},
    {"mkls", {BaseRule::MKrum, RuleVariant::LS}},
    {"als", {BaseRule::Aksel, RuleVariant::LS}},
}};

// Ids 0..n-1 ordered by ascending key, ties by lower id.
std::vector<std::size_t> argsort(const std::vector<double>& keys) {
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return order;
}

void require_matching_n(const SubmissionSet& set, const AggregatorConfig& cfg) {
    if (cfg.n != set.size()) {
        throw InvalidArgument(fmt::format("aggregator configured for n={} but got {} submissions", cfg.n, set.size()));
    }
}

std::vector<double> distances_to(const SubmissionSet& set, const GradientVector& center) {
    std::vector<double> out(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) out[i] = euclidean_distance_sq(set[i], center);
    return out;
}

TrustAssessment split_by_order(std::vector<double> criteria, std::size_t trusted_count) {
    const auto order = argsort(criteria);
    TrustAssessment out;
    out.trusted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(trusted_count));
    out.suspected.assign(order.begin() + static_cast<std::ptrdiff_t>(trusted_count), order.end());
    std::sort(out.trusted.begin(), out.trusted.end());
    std::sort(out.suspected.begin(), out.suspected.end());
    out.criteria = std::move(criteria);
    return out;
}

TrustAssessment aksel_trust(const SubmissionSet& set) {
    TrustAssessment out;
    out.criteria = distances_to(set, coordinate_median(set));
    const double radius = scalar_median(out.criteria);
    for (std::size_t i = 0; i < set.size(); ++i) {
        (out.criteria[i] <= radius ? out.trusted : out.suspected).push_back(i);
    }
    return out;
}

}  // namespace

RuleId RuleId::parse(std::string_view name) {
    for (const auto& r : kRules) {
        if (name == r.name) return r.id;
    }
    throw InvalidArgument(fmt::format("unknown rule id '{}'", name));
}

std::string RuleId::name() const {
    for (const auto& r : kRules) {
        if (r.id == *this) return r.name;
    }
    throw InvalidArgument("rule combination has no identifier");
}

const std::vector<std::string>& known_rule_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& r : kRules) out.emplace_back(r.name);
        return out;
    }();
    return names;
}

void AggregatorConfig::validate() const {
    if (n == 0) throw InvalidArgument("aggregator needs n >= 1");
    if (2 * b >= n) throw InvalidArgument(fmt::format("Byzantine budget b={} must satisfy 2b < n={}", b, n));
    if (m && (*m < 1 || *m > n)) throw InvalidArgument(fmt::format("m={} must be in [1, {}]", *m, n));
    if (bucket_s < 1) throw InvalidArgument("bucket size must be >= 1");
    if (trim_t && 2 * *trim_t >= n) throw InvalidArgument(fmt::format("trim count {} needs 2t < n={}", *trim_t, n));
}

std::vector<bool> TrustAssessment::trusted_mask() const {
    std::vector<bool> mask(criteria.size(), false);
    for (std::size_t i : trusted) mask[i] = true;
    return mask;
}

void LSConfig::validate() const {
    if (!(alpha_t > 0.0)) throw InvalidArgument("alpha_t must be > 0");
    if (!(alpha_b >= 0.0)) throw InvalidArgument("alpha_b must be >= 0");
    if (!(eps_div > 0.0)) throw InvalidArgument("eps_div must be > 0");
}

GradientVector mean_aggregate(const SubmissionSet& set) { return coordinate_mean(set); }

GradientVector cm_aggregate(const SubmissionSet& set) { return coordinate_median(set); }

GradientVector trimmed_mean_aggregate(const SubmissionSet& set, std::size_t trim) {
    return coordinate_trimmed_mean(set, trim);
}

std::vector<double> krum_scores(const SubmissionSet& set, std::size_t b) {
    const std::size_t n = set.size();
    if (n < b + 3) {
        throw InvalidArgument(fmt::format("Krum needs n - b - 2 >= 1 (n={}, b={})", n, b));
    }
    const std::size_t neighbours = n - b - 2;
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[i * n + j] = dist[j * n + i] = euclidean_distance_sq(set[i], set[j]);
        }
    }
    std::vector<double> scores(n);
    std::vector<std::size_t> others;
    others.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        others.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) others.push_back(j);
        }
        const double* row = &dist[i * n];
        std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t c) { return row[a] < row[c]; });
        double s = 0.0;
        for (std::size_t k = 0; k < neighbours; ++k) s += row[others[k]];
        scores[i] = s;
    }
    return scores;
}

std::vector<std::size_t> mkrum_select(const SubmissionSet& set, std::size_t b, std::size_t m) {
    if (m < 1 || m > set.size()) throw InvalidArgument(fmt::format("m={} must be in [1, {}]", m, set.size()));
    const auto order = argsort(krum_scores(set, b));
    std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

GradientVector mkrum_aggregate(const SubmissionSet& set, std::size_t b, std::size_t m) {
    const auto chosen = mkrum_select(set, b, m);
    return coordinate_mean(set.select(chosen));
}

GradientVector aksel_aggregate(const SubmissionSet& set) {
    return coordinate_mean(set.select(aksel_trust(set).trusted));
}

TrustAssessment assess_trust(BaseRule rule, const SubmissionSet& set, const AggregatorConfig& cfg) {
    require_matching_n(set, cfg);
    switch (rule) {
        case BaseRule::MKrum: {
            const std::size_t m = cfg.krum_m();
            if (m < 1 || m > set.size()) throw InvalidArgument(fmt::format("m={} must be in [1, {}]", m, set.size()));
            return split_by_order(krum_scores(set, cfg.b), m);
        }
        case BaseRule::Aksel:
            return aksel_trust(set);
        case BaseRule::CM:
            if (cfg.b >= set.size()) throw InvalidArgument("CM split needs b < n");
            return split_by_order(distances_to(set, coordinate_median(set)), set.size() - cfg.b);
        case BaseRule::Mean:
        case BaseRule::TrimmedMean:
            break;
    }
    throw InvalidArgument("trust assessment is defined for cm, mkrum and aksel only");
}

TradeOffVector ls_weights(const TrustAssessment& assessment, const LSConfig& ls) {
    ls.validate();
    const std::size_t n = assessment.size();
    if (n == 0) throw InvalidArgument("empty trust assessment");
    if (assessment.trusted.empty()) throw InvalidArgument("trust assessment has no trusted worker");
    if (assessment.trusted.size() + assessment.suspected.size() != n) {
        throw InvalidArgument("trusted and suspected sets must partition the workers");
    }
    std::vector<double> alpha(n, -1.0);
    for (std::size_t i : assessment.trusted) alpha.at(i) = ls.alpha_t;
    for (std::size_t i : assessment.suspected) {
        if (alpha.at(i) >= 0.0) throw InvalidArgument("worker is both trusted and suspected");
        alpha[i] = ls.alpha_b;
    }
    TradeOffVector out;
    out.lambda.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = assessment.criteria[i];
        if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("trust criteria must be finite and >= 0");
        out.lambda[i] = alpha[i] / (c + ls.eps_div);
        total += out.lambda[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw SimulationError("trade-off weights cannot be normalized");
    for (auto& w : out.lambda) w /= total;
    return out;
}

LSResult ls_aggregate(const SubmissionSet& set, const TrustAssessment& assessment, const LSConfig& ls) {
    if (assessment.size() != set.size()) throw InvalidArgument("trust assessment does not cover every worker");
    auto weights = ls_weights(assessment, ls);
    auto output = weighted_sum(set, weights.lambda);
    return {std::move(output), std::move(weights)};
}

std::size_t bucketed_budget(std::size_t n, std::size_t bucket_s, std::size_t b) {
    const std::size_t buckets = (n + bucket_s - 1) / bucket_s;
    const std::size_t half = buckets / 2;  // ceil((buckets - 1) / 2)
    const std::size_t breakdown = half > 0 ? half - 1 : 0;
    return std::min({b, buckets - 1, breakdown});
}

GradientVector bucketing_wrap(const SubmissionSet& set, std::size_t bucket_s, std::uint64_t seed, BaseRule inner,
                              const AggregatorConfig& cfg) {
    const std::size_t n = set.size();
    if (bucket_s < 1) throw InvalidArgument("bucket size must be >= 1");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_stream(seed, "bucketing");
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<GradientVector> means;
    for (std::size_t start = 0; start < n; start += bucket_s) {
        const std::size_t stop = std::min(n, start + bucket_s);
        GradientVector acc(set.dim());
        for (std::size_t j = start; j < stop; ++j) acc += set[order[j]];
        acc *= 1.0 / static_cast<double>(stop - start);
        means.push_back(std::move(acc));
    }
    const SubmissionSet buckets(std::move(means));

    AggregatorConfig inner_cfg;
    inner_cfg.n = buckets.size();
    inner_cfg.b = bucketed_budget(n, bucket_s, cfg.b);
    inner_cfg.bucket_s = 1;
    return base_aggregate(inner, buckets, inner_cfg);
}

GradientVector base_aggregate(BaseRule rule, const SubmissionSet& set, const AggregatorConfig& cfg) {
    require_matching_n(set, cfg);
    switch (rule) {
        case BaseRule::Mean: return mean_aggregate(set);
        case BaseRule::CM: return cm_aggregate(set);
        case BaseRule::MKrum: return mkrum_aggregate(set, cfg.b, cfg.krum_m());
        case BaseRule::Aksel: return aksel_aggregate(set);
        case BaseRule::TrimmedMean: return trimmed_mean_aggregate(set, cfg.trim());
    }
    throw InvalidArgument("unknown base rule");
}

AggregateResult aggregate(const RuleId& rule, const SubmissionSet& set, const AggregatorConfig& cfg,
                          const std::optional<LSConfig>& ls, std::uint64_t seed) {
    require_matching_n(set, cfg);
    switch (rule.variant) {
        case RuleVariant::Plain:
            return {base_aggregate(rule.base, set, cfg), std::nullopt, std::nullopt};
        case RuleVariant::Bucketing:
            return {bucketing_wrap(set, cfg.bucket_s, seed, rule.base, cfg), std::nullopt, std::nullopt};
        case RuleVariant::LS: {
            auto assessment = assess_trust(rule.base, set, cfg);
            auto result = ls_aggregate(set, assessment, ls.value_or(LSConfig{}));
            return {std::move(result.aggregate), std::move(result.weights), std::move(assessment)};
        }
    }
    throw InvalidArgument("unknown rule variant");
}

}  // namespace byzls
