#pragma once

// Sample-moment kernels shared by the estimators. Every reduction is a
// sequential pass in index order so results are bit-reproducible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "rmtcorr/common.hpp"

namespace rmtcorr::stats {

struct JointMoments {
    std::size_t n = 0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double sxx = 0.0; // centered sums, not divided by n
    double syy = 0.0;
    double sxy = 0.0;
    bool x_constant = true;
    bool y_constant = true;
    double first_y = 0.0;
};

/// Two-pass centered moments over indices where both x and y are observed.
inline JointMoments joint_moments(const double* x, const double* y, std::size_t t)
{
    JointMoments m;
    double sx = 0.0;
    double sy = 0.0;
    double first_x = 0.0;
    for (std::size_t k = 0; k < t; ++k) {
        if (is_missing(x[k]) || is_missing(y[k]))
            continue;
        if (m.n == 0) {
            first_x = x[k];
            m.first_y = y[k];
        } else {
            if (x[k] != first_x)
                m.x_constant = false;
            if (y[k] != m.first_y)
                m.y_constant = false;
        }
        sx += x[k];
        sy += y[k];
        ++m.n;
    }
    if (m.n == 0)
        return m;
    m.mean_x = sx / static_cast<double>(m.n);
    m.mean_y = sy / static_cast<double>(m.n);
    for (std::size_t k = 0; k < t; ++k) {
        if (is_missing(x[k]) || is_missing(y[k]))
            continue;
        const double dx = x[k] - m.mean_x;
        const double dy = y[k] - m.mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    if (m.x_constant)
        m.sxx = 0.0;
    if (m.y_constant)
        m.syy = 0.0;
    return m;
}

struct PairCorrelation {
    std::size_t n = 0;
    double corr = 0.0;
    bool defined = false;
    bool x_constant = false;
    bool y_constant = false;
};

/// Pearson coefficient on the joint sample. `defined` is false when either
/// side is constant there (or fewer than two points exist).
inline PairCorrelation pearson_pair(const double* x, const double* y, std::size_t t)
{
    const auto m = joint_moments(x, y, t);
    PairCorrelation p;
    p.n = m.n;
    p.x_constant = m.x_constant;
    p.y_constant = m.y_constant;
    if (m.n < 2 || m.x_constant || m.y_constant || m.sxx <= 0.0 || m.syy <= 0.0)
        return p;
    p.corr = std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
    p.defined = true;
    return p;
}

inline JointMoments ols_pair(const double* x, const double* y, std::size_t t) { return joint_moments(x, y, t); }

inline double pearson(std::span<const double> x, std::span<const double> y)
{
    const auto p = pearson_pair(x.data(), y.data(), std::min(x.size(), y.size()));
    return p.defined ? p.corr : std::nan("");
}

/// 1-based ranks with ties sharing their average rank.
inline std::vector<double> average_ranks(std::span<const double> v)
{
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t end = k + 1;
        while (end < order.size() && v[order[end]] == v[order[k]])
            ++end;
        const double r = 0.5 * static_cast<double>(k + 1 + end);
        for (std::size_t a = k; a < end; ++a)
            ranks[order[a]] = r;
        k = end;
    }
    return ranks;
}

} // namespace rmtcorr::stats
