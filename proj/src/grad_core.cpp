#include "byzls/grad_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace byzls {

namespace {

void require_same_dim(const GradientVector& a, const GradientVector& b) {
    if (a.dim() != b.dim()) {
        throw InvalidArgument("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    }
}

// Median of the values in [first, last); reorders the range.
double median_in_place(std::vector<double>::iterator first, std::vector<double>::iterator last) {
    const auto n = static_cast<std::size_t>(last - first);
    const auto mid = first + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(first, mid, last);
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(first, mid);
    return 0.5 * (lower + upper);
}

}  // namespace

bool GradientVector::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

GradientVector& GradientVector::operator+=(const GradientVector& other) {
    require_same_dim(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

GradientVector& GradientVector::operator-=(const GradientVector& other) {
    require_same_dim(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

GradientVector& GradientVector::operator*=(double scale) noexcept {
    for (auto& x : values_) x *= scale;
    return *this;
}

GradientVector operator+(GradientVector a, const GradientVector& b) { return a += b; }
GradientVector operator-(GradientVector a, const GradientVector& b) { return a -= b; }
GradientVector operator*(double scale, GradientVector v) { return v *= scale; }

double dot(const GradientVector& a, const GradientVector& b) {
    require_same_dim(a, b);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) acc += a[k] * b[k];
    return acc;
}

double squared_norm(const GradientVector& v) noexcept {
    double acc = 0.0;
    for (double x : v.values()) acc += x * x;
    return acc;
}

SubmissionSet::SubmissionSet(std::vector<GradientVector> vectors) : vectors_(std::move(vectors)) {
    if (vectors_.empty()) throw InvalidArgument("submission set is empty");
    const std::size_t d = vectors_.front().dim();
    if (d == 0) throw InvalidArgument("submissions must have dimension >= 1");
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        if (vectors_[i].dim() != d) {
            throw InvalidArgument("submission " + std::to_string(i) + " has dimension " +
                                  std::to_string(vectors_[i].dim()) + ", expected " +
                                  std::to_string(d));
        }
        if (!vectors_[i].all_finite()) {
            throw InvalidArgument("submission " + std::to_string(i) + " has a non-finite entry");
        }
    }
}

SubmissionSet SubmissionSet::select(std::span<const std::size_t> ids) const {
    std::vector<GradientVector> out;
    out.reserve(ids.size());
    for (std::size_t id : ids) {
        if (id >= vectors_.size()) throw InvalidArgument("worker id out of range");
        out.push_back(vectors_[id]);
    }
    return SubmissionSet(std::move(out));
}

double euclidean_distance_sq(const GradientVector& a, const GradientVector& b) {
    require_same_dim(a, b);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        const double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return acc;
}

GradientVector coordinate_mean(const SubmissionSet& set) {
    GradientVector out(set.dim());
    for (const auto& g : set) out += g;
    const double count = static_cast<double>(set.size());
    for (auto& x : out.values()) x /= count;
    return out;
}

GradientVector coordinate_median(const SubmissionSet& set) {
    const std::size_t n = set.size();
    GradientVector out(set.dim());
    std::vector<double> column(n);
    for (std::size_t k = 0; k < set.dim(); ++k) {
        for (std::size_t i = 0; i < n; ++i) column[i] = set[i][k];
        out[k] = median_in_place(column.begin(), column.end());
    }
    return out;
}

GradientVector coordinate_trimmed_mean(const SubmissionSet& set, std::size_t trim) {
    const std::size_t n = set.size();
    if (2 * trim >= n) {
        throw InvalidArgument("trimmed mean needs 2*t < n (t=" + std::to_string(trim) +
                              ", n=" + std::to_string(n) + ")");
    }
    GradientVector out(set.dim());
    std::vector<double> column(n);
    const double kept = static_cast<double>(n - 2 * trim);
    for (std::size_t k = 0; k < set.dim(); ++k) {
        for (std::size_t i = 0; i < n; ++i) column[i] = set[i][k];
        std::sort(column.begin(), column.end());
        double acc = 0.0;
        for (std::size_t i = trim; i < n - trim; ++i) acc += column[i];
        out[k] = acc / kept;
    }
    return out;
}

GradientVector weighted_sum(const SubmissionSet& set, std::span<const double> weights) {
    if (weights.size() != set.size()) throw InvalidArgument("one weight per submission required");
    GradientVector out(set.dim());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;
        const auto src = set[i].values();
        for (std::size_t k = 0; k < out.dim(); ++k) out[k] += w * src[k];
    }
    return out;
}

double scalar_median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty list");
    return median_in_place(values.begin(), values.end());
}

}  // namespace byzls
