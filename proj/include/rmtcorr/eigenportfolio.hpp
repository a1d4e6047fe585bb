#pragma once

#include <span>

#include "rmtcorr/panel.hpp"

namespace rmtcorr {

/// How MISSING stock returns enter an eigenportfolio return.
enum class MissingPolicy {
    ZeroFill, ///< missing contributes 0; normalizer unchanged
    Strict,   ///< emit only at timestamps where every stock is observed
};

struct EigenportfolioSeries {
    std::size_t k = 0;
    Series returns;
    double normalizer = 0.0; ///< sum of the eigenvector's components
};

/// R_k(t) = u . r(t) / sum(u). Throws DegenerateNormalizer when |sum(u)| <= 1e-6.
EigenportfolioSeries eigenportfolio_returns(const ReturnPanel& panel, std::span<const double> u, std::size_t k = 1,
                                            MissingPolicy policy = MissingPolicy::ZeroFill);

/// OLS of a response series on an index series over their joint timestamps.
struct MarketRegression {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    /// Slope of the reverse regression (index on response).
    double inverse_slope = 0.0;
    std::size_t n_points = 0;
};

MarketRegression market_regression(const Series& response, const Series& index_returns);

} // namespace rmtcorr
