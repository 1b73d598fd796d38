#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "byzls/error.hpp"

namespace byzls {

/// Dense gradient (or parameter) vector exchanged between workers and the server.
class GradientVector {
public:
    GradientVector() = default;
    explicit GradientVector(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
    explicit GradientVector(std::vector<double> values) : values_(std::move(values)) {}
    GradientVector(std::initializer_list<double> values) : values_(values) {}

    [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const noexcept { return values_[k]; }
    [[nodiscard]] double& operator[](std::size_t k) noexcept { return values_[k]; }

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& vec() const noexcept { return values_; }

    [[nodiscard]] bool all_finite() const noexcept;

    GradientVector& operator+=(const GradientVector& other);
    GradientVector& operator-=(const GradientVector& other);
    GradientVector& operator*=(double scale) noexcept;

    friend bool operator==(const GradientVector&, const GradientVector&) = default;

private:
    std::vector<double> values_;
};

[[nodiscard]] GradientVector operator+(GradientVector a, const GradientVector& b);
[[nodiscard]] GradientVector operator-(GradientVector a, const GradientVector& b);
[[nodiscard]] GradientVector operator*(double scale, GradientVector v);

[[nodiscard]] double dot(const GradientVector& a, const GradientVector& b);
[[nodiscard]] double squared_norm(const GradientVector& v) noexcept;

/// Ordered, validated set of worker submissions for one round.
///
/// Construction rejects an empty set, mixed dimensions, zero-dimensional
/// vectors and any non-finite entry.
class SubmissionSet {
public:
    explicit SubmissionSet(std::vector<GradientVector> vectors);

    [[nodiscard]] std::size_t size() const noexcept { return vectors_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return vectors_.front().dim(); }
    [[nodiscard]] const GradientVector& operator[](std::size_t i) const noexcept { return vectors_[i]; }
    [[nodiscard]] const std::vector<GradientVector>& vectors() const noexcept { return vectors_; }

    [[nodiscard]] auto begin() const noexcept { return vectors_.begin(); }
    [[nodiscard]] auto end() const noexcept { return vectors_.end(); }

    /// The subset at the given worker ids, in the order given.
    [[nodiscard]] SubmissionSet select(std::span<const std::size_t> ids) const;

private:
    std::vector<GradientVector> vectors_;
};

/// Sum of squared coordinate differences.
[[nodiscard]] double euclidean_distance_sq(const GradientVector& a, const GradientVector& b);

/// Coordinate-wise mean.
[[nodiscard]] GradientVector coordinate_mean(const SubmissionSet& set);

/// Coordinate-wise median; for even n the average of the two middle order statistics.
[[nodiscard]] GradientVector coordinate_median(const SubmissionSet& set);

/// Coordinate-wise mean after dropping the `trim` largest and `trim` smallest values.
[[nodiscard]] GradientVector coordinate_trimmed_mean(const SubmissionSet& set, std::size_t trim);

/// Weighted sum of the submissions; `weights` must have one entry per worker.
[[nodiscard]] GradientVector weighted_sum(const SubmissionSet& set, std::span<const double> weights);

/// Median of a list of scalars (same even-n convention as coordinate_median).
[[nodiscard]] double scalar_median(std::vector<double> values);

}  // namespace byzls
