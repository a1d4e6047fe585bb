#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmtcorr/ingest.hpp"

namespace rmtcorr {

struct SectorBlock {
    std::size_t size = 0;
    double strength = 0.0; ///< loading on the block's own factor
};

/**
 * Parameters of the planted factor market
 *
 *   r_i(t) = beta_i f(t) + g_i h(t) + s_b(i) z_b(t) + eps_i(t)
 *
 * with f ~ N(0, market_vol^2), h ~ N(0, 1), z_b ~ N(0, 1),
 * eps_i ~ N(0, idio_vol^2), g_i = +group_factor_strength for the first
 * round(group_fraction * n) stocks (labelled SZSE) and
 * -group_factor_strength for the rest (SHSE). Betas increase linearly with
 * log capitalization over [beta_lo, beta_hi].
 */
struct SynthConfig {
    std::size_t n_stocks = 200;
    std::size_t n_days = 25;
    std::size_t minutes_per_day = 240;
    double market_vol = 1e-3;
    double beta_lo = 0.5;
    double beta_hi = 1.5;
    double group_factor_strength = 0.0;
    double group_fraction = 0.4;
    std::vector<SectorBlock> sector_blocks;
    double idio_vol = 1e-3;
    double missing_rate = 0.0; ///< probability that a bar is absent
    std::uint64_t seed = 1;
    std::int32_t first_day = 13517; ///< 2007-01-04
    std::int32_t session_open = 570; ///< 09:30

    /// Throws InvalidConfig describing the first violated constraint.
    void validate() const;
};

struct GroundTruth {
    Series factor;       ///< f(t) on every generated return slot
    Series group_factor; ///< h(t)
    std::vector<double> betas;
    std::vector<int> group_labels; ///< 0 = SZSE group, 1 = SHSE group
    std::vector<std::string> sector_labels;
    std::vector<double> capitalizations;
};

struct SynthMarket {
    std::vector<BarSeries> bars;
    std::vector<StockMeta> meta;
    ReturnPanel panel;
    GroundTruth truth;
};

/// Generates bars, metadata, the panel those bars ingest to, and the
/// planted truth. Bit-identical for identical configs.
SynthMarket generate_factor_market(const SynthConfig& config);

} // namespace rmtcorr
