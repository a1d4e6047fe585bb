#pragma once

// Shared fixtures and reference implementations for the test binaries.
// Everything here is written independently of src/ so it can serve as an
// oracle: plain loops, long double accumulation, no shared helpers.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtcorr/panel.hpp"

namespace testing {

using rmtcorr::Grid;
using rmtcorr::ReturnPanel;
using rmtcorr::Series;
using rmtcorr::StockMeta;
using rmtcorr::Timestamp;

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// Seeded Gaussian source. Box-Muller over a 64-bit LCG keeps the test
/// data independent of the library's own random streams.
class Gauss {
public:
    explicit Gauss(std::uint64_t seed) : state_(seed * 6364136223846793005ULL + 1442695040888963407ULL) {}

    double uniform()
    {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return (static_cast<double>(state_ >> 11) + 0.5) * 0x1.0p-53;
    }

    double operator()()
    {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * M_PI * uniform();
        spare_ = r * std::sin(a);
        return r * std::cos(a);
    }

    std::vector<double> vector(std::size_t n, double scale = 1.0)
    {
        std::vector<double> v(n);
        for (auto& x : v)
            x = scale * (*this)();
        return v;
    }

private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

/// Pearson correlation over indices where both values are finite.
inline std::optional<double> pearson_oracle(const std::vector<double>& x, const std::vector<double>& y)
{
    long double sx = 0, sy = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (std::isnan(x[k]) || std::isnan(y[k]))
            continue;
        sx += x[k];
        sy += y[k];
        ++n;
    }
    if (n < 2)
        return std::nullopt;
    const long double mx = sx / n, my = sy / n;
    long double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (std::isnan(x[k]) || std::isnan(y[k]))
            continue;
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (sxx == 0 || syy == 0)
        return std::nullopt;
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

struct OlsOracle {
    double alpha;
    double beta;
    double r2;
};

inline OlsOracle ols_oracle(const std::vector<double>& y, const std::vector<double>& x)
{
    long double sx = 0, sy = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (std::isnan(x[k]) || std::isnan(y[k]))
            continue;
        sx += x[k];
        sy += y[k];
        ++n;
    }
    const long double mx = sx / n, my = sy / n;
    long double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (std::isnan(x[k]) || std::isnan(y[k]))
            continue;
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    const long double beta = sxy / sxx;
    return {static_cast<double>(my - beta * mx), static_cast<double>(beta),
            syy == 0 ? 1.0 : static_cast<double>(sxy * sxy / (sxx * syy))};
}

/// Timestamps k -> (day 20000 + k / 240, minute 570 + k % 240).
inline std::vector<Timestamp> minute_grid(std::size_t t)
{
    std::vector<Timestamp> ts;
    for (std::size_t k = 0; k < t; ++k)
        ts.push_back({static_cast<std::int32_t>(20000 + k / 240), static_cast<std::int32_t>(570 + k % 240)});
    return ts;
}

inline ReturnPanel make_panel(const std::vector<std::vector<double>>& rows,
                              std::vector<rmtcorr::Exchange> exchanges = {},
                              std::vector<std::optional<double>> caps = {})
{
    const std::size_t n = rows.size();
    const std::size_t t = n ? rows[0].size() : 0;
    Grid values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
    std::vector<std::string> tickers;
    std::vector<StockMeta> meta;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < t; ++k)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        tickers.push_back("T" + std::to_string(1000 + i));
        StockMeta m;
        m.ticker = tickers.back();
        m.exchange = i < exchanges.size() ? exchanges[i] : rmtcorr::Exchange::OTHER;
        m.sector = "C";
        if (i < caps.size())
            m.capitalization = caps[i];
        meta.push_back(m);
    }
    return ReturnPanel(std::move(tickers), minute_grid(t), std::move(values), std::move(meta));
}

inline Series make_series(const std::vector<double>& v)
{
    Series s;
    const auto ts = minute_grid(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!std::isnan(v[k]))
            s.push_back(ts[k], v[k]);
    }
    return s;
}

/// Independent Gaussian rows, n x t.
inline std::vector<std::vector<double>> gaussian_rows(std::size_t n, std::size_t t, std::uint64_t seed,
                                                      double scale = 1e-3)
{
    Gauss g(seed);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i)
        rows.push_back(g.vector(t, scale));
    return rows;
}

/// One-factor rows r_i = beta_i f + eps_i; the factor is returned in `factor`.
inline std::vector<std::vector<double>> factor_rows(std::size_t n, std::size_t t, std::uint64_t seed,
                                                    std::vector<double>& factor, double idio = 1.0)
{
    Gauss g(seed);
    factor = g.vector(t);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const double beta = 0.5 + static_cast<double>(i) / static_cast<double>(n);
        std::vector<double> r(t);
        for (std::size_t k = 0; k < t; ++k)
            r[k] = beta * factor[k] + idio * g();
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::filesystem::path temp_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("rmtcorr_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Elementwise equality where NaN matches NaN.
inline bool same_values(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (!(a(i, j) == b(i, j) || (std::isnan(a(i, j)) && std::isnan(b(i, j)))))
                return false;
    return true;
}

} // namespace testing

#define CHECK_THROWS_CODE(expr, expected_code)                                                                         \
    do {                                                                                                               \
        bool caught_ = false;                                                                                          \
        try {                                                                                                          \
            (void)(expr);                                                                                              \
        } catch (const rmtcorr::Error& e_) {                                                                           \
            caught_ = true;                                                                                            \
            CHECK(e_.code() == (expected_code));                                                                       \
        }                                                                                                              \
        CHECK_MESSAGE(caught_, "expected rmtcorr::Error from " #expr);                                                 \
    } while (0)
