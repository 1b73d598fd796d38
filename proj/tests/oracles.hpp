#pragma once

// Brute-force reference computations used only by the tests. They share no
// code with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "byzls/grad_core.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // rows = workers

inline Matrix rows_of(const byzls::SubmissionSet& set) {
    Matrix out;
    for (const auto& g : set) out.emplace_back(g.vec());
    return out;
}

inline byzls::SubmissionSet to_set(const Matrix& rows) {
    std::vector<byzls::GradientVector> v;
    for (const auto& r : rows) v.emplace_back(r);
    return byzls::SubmissionSet(std::move(v));
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

inline double sorted_median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline std::vector<double> coordinate_median(const Matrix& rows) {
    std::vector<double> out(rows.front().size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::vector<double> col;
        for (const auto& r : rows) col.push_back(r[k]);
        out[k] = sorted_median(col);
    }
    return out;
}

inline std::vector<double> mean_of(const Matrix& rows, const std::vector<std::size_t>& ids) {
    std::vector<double> out(rows.front().size(), 0.0);
    for (auto i : ids) {
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += rows[i][k];
    }
    for (auto& x : out) x /= static_cast<double>(ids.size());
    return out;
}

/// Exhaustive pairwise distances; each score sums the n-b-2 smallest
/// (distance, index) pairs.
inline std::vector<double> krum_scores(const Matrix& rows, std::size_t b) {
    const std::size_t n = rows.size();
    std::vector<double> scores(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) d.emplace_back(sq_dist(rows[i], rows[j]), j);
        }
        std::sort(d.begin(), d.end());
        for (std::size_t k = 0; k < n - b - 2; ++k) scores[i] += d[k].first;
    }
    return scores;
}

inline std::vector<std::size_t> smallest_ids(const std::vector<double>& scores, std::size_t m) {
    std::vector<std::pair<double, std::size_t>> s;
    for (std::size_t i = 0; i < scores.size(); ++i) s.emplace_back(scores[i], i);
    std::sort(s.begin(), s.end());
    std::vector<std::size_t> ids;
    for (std::size_t k = 0; k < m; ++k) ids.push_back(s[k].second);
    std::sort(ids.begin(), ids.end());
    return ids;
}

struct AkselSteps {
    std::vector<double> center;
    std::vector<double> scores;
    double radius = 0.0;
    std::vector<std::size_t> trusted;
    std::vector<double> output;
};

/// M = CM(G); s(i) = ||g_i - M||^2; r = Median(S); G_t = {i : s(i) in [0, r]}; output = mean(G_t).
inline AkselSteps aksel(const Matrix& rows) {
    AkselSteps st;
    st.center = coordinate_median(rows);
    for (const auto& r : rows) st.scores.push_back(sq_dist(r, st.center));
    st.radius = sorted_median(st.scores);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (st.scores[i] >= 0.0 && st.scores[i] <= st.radius) st.trusted.push_back(i);
    }
    st.output = mean_of(rows, st.trusted);
    return st;
}

/// Welford running moments; returns (mean, population standard deviation) per coordinate.
inline std::pair<std::vector<double>, std::vector<double>> moments(const Matrix& rows) {
    const std::size_t d = rows.front().size();
    std::vector<double> mean(d, 0.0), m2(d, 0.0);
    double count = 0.0;
    for (const auto& r : rows) {
        count += 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double delta = r[k] - mean[k];
            mean[k] += delta / count;
            m2[k] += delta * (r[k] - mean[k]);
        }
    }
    std::vector<double> sd(d);
    for (std::size_t k = 0; k < d; ++k) sd[k] = std::sqrt(m2[k] / count);
    return {mean, sd};
}

inline Matrix random_rows(std::mt19937_64& rng, std::size_t n, std::size_t d, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix rows(n, std::vector<double>(d));
    for (auto& r : rows) {
        for (auto& x : r) x = normal(rng);
    }
    return rows;
}

}  // namespace oracle

#include <functional>

namespace oracle {

/// Central differences of f at x with step h.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double orig = x[k];
        x[k] = orig + h;
        const double up = f(x);
        x[k] = orig - h;
        const double down = f(x);
        x[k] = orig;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

/// ||a - b|| / max(||a||, ||b||, 1e-12).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff += (a[k] - b[k]) * (a[k] - b[k]);
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

}  // namespace oracle
