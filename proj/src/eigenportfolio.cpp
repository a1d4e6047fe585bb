#include "rmtcorr/eigenportfolio.hpp"

#include <cmath>

#include "stats.hpp"

namespace rmtcorr {

EigenportfolioSeries eigenportfolio_returns(const ReturnPanel& panel, std::span<const double> u, std::size_t k,
                                            MissingPolicy policy)
{
    if (u.size() != panel.n_stocks())
        throw Error(ErrorCode::InvalidConfig, "eigenvector length " + std::to_string(u.size()) +
                                                  " does not match panel size " + std::to_string(panel.n_stocks()));
    double normalizer = 0.0;
    for (double x : u)
        normalizer += x;
    if (!(std::abs(normalizer) > 1e-6))
        throw Error(ErrorCode::DegenerateNormalizer,
                    "eigenvector " + std::to_string(k) + " has component sum " + format_double(normalizer));

    EigenportfolioSeries out;
    out.k = k;
    out.normalizer = normalizer;
    for (std::size_t t = 0; t < panel.n_times(); ++t) {
        double acc = 0.0;
        bool complete = true;
        for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
            const double r = panel.at(i, t);
            if (is_missing(r)) {
                complete = false;
                continue;
            }
            acc += u[i] * r;
        }
        if (policy == MissingPolicy::Strict && !complete)
            continue;
        out.returns.push_back(panel.timestamps()[t], acc / normalizer);
    }
    return out;
}

MarketRegression market_regression(const Series& response, const Series& index_returns)
{
    std::vector<double> x;
    std::vector<double> y;
    std::size_t j = 0;
    for (std::size_t a = 0; a < response.size(); ++a) {
        while (j < index_returns.size() && index_returns.timestamps[j] < response.timestamps[a])
            ++j;
        if (j < index_returns.size() && index_returns.timestamps[j] == response.timestamps[a]) {
            x.push_back(index_returns.values[j]);
            y.push_back(response.values[a]);
        }
    }
    if (x.size() < 3)
        throw Error(ErrorCode::TooFewPoints,
                    "regression needs >= 3 joint points, got " + std::to_string(x.size()));

    const auto m = stats::joint_moments(x.data(), y.data(), x.size());
    if (m.x_constant || m.sxx <= 0.0)
        throw Error(ErrorCode::DegenerateIndex, "index has zero variance on the regression sample");

    MarketRegression reg;
    reg.n_points = m.n;
    reg.slope = m.sxy / m.sxx;
    reg.intercept = m.mean_y - reg.slope * m.mean_x;
    const double rss = std::max(0.0, m.syy - reg.slope * m.sxy);
    reg.r_squared = m.syy > 0.0 ? std::clamp(m.sxy * m.sxy / (m.sxx * m.syy), 0.0, 1.0) : 0.0;
    reg.slope_stderr = std::sqrt(rss / static_cast<double>(m.n - 2) / m.sxx);
    reg.inverse_slope = m.syy > 0.0 ? m.sxy / m.syy : 0.0;
    return reg;
}

} // namespace rmtcorr
