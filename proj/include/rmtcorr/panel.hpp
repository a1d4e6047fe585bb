#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmtcorr/common.hpp"

namespace rmtcorr {

enum class Exchange { SZSE, SHSE, OTHER };

std::string_view to_string(Exchange e) noexcept;
/// Unknown exchange names map to OTHER.
Exchange parse_exchange(std::string_view text) noexcept;

struct StockMeta {
    std::string ticker;
    Exchange exchange = Exchange::OTHER;
    std::string sector;
    std::optional<double> capitalization;
};

/**
 * Aligned stocks x timestamps matrix of intraday log-returns.
 *
 * Cells with no observation hold kMissing. The constructor enforces:
 *   - timestamps strictly increasing, one row per ticker, unique tickers
 *   - every observed value finite
 *   - no timestamp column that is MISSING for every stock
 *   - meta[i].ticker == tickers[i]
 *
 * Immutable after construction; safe for concurrent reads.
 */
class ReturnPanel {
public:
    ReturnPanel() = default;
    ReturnPanel(std::vector<std::string> tickers, std::vector<Timestamp> timestamps, Grid values,
                std::vector<StockMeta> meta);

    std::size_t n_stocks() const noexcept { return tickers_.size(); }
    std::size_t n_times() const noexcept { return timestamps_.size(); }

    const std::vector<std::string>& tickers() const noexcept { return tickers_; }
    const std::vector<Timestamp>& timestamps() const noexcept { return timestamps_; }
    const Grid& values() const noexcept { return values_; }
    const std::vector<StockMeta>& meta() const noexcept { return meta_; }

    double at(std::size_t stock, std::size_t t) const { return values_(stock, t); }
    std::span<const double> row(std::size_t stock) const
    {
        return {values_.data() + stock * n_times(), n_times()};
    }

    /// Stocks whose observed returns are all identical (sd exactly 0).
    bool zero_variance(std::size_t stock) const { return zero_variance_[stock]; }
    std::size_t observed_count(std::size_t stock) const { return observed_[stock]; }
    /// Distinct trading days on which the stock has at least one return.
    std::size_t active_days(std::size_t stock) const { return active_days_[stock]; }
    std::size_t missing_count() const noexcept;
    bool complete() const noexcept { return missing_count() == 0; }

    std::optional<std::size_t> find(std::string_view ticker) const;

    /// Observed cells of one stock, in time order.
    Series row_series(std::size_t stock) const;

    /// Keeps the listed rows (in the given order) and drops columns that
    /// become entirely MISSING.
    ReturnPanel select_rows(std::span<const std::size_t> rows) const;

    /// Keeps the listed timestamp columns (ascending); every kept column
    /// must still hold an observation.
    ReturnPanel select_timestamps(std::span<const std::size_t> cols) const;

    /// Keeps only timestamps where every stock is observed.
    ReturnPanel common_timestamps() const;

private:
    std::vector<std::string> tickers_;
    std::vector<Timestamp> timestamps_;
    Grid values_;
    std::vector<StockMeta> meta_;
    std::vector<bool> zero_variance_;
    std::vector<std::size_t> observed_;
    std::vector<std::size_t> active_days_;
};

/// Index series aligned to a panel's timestamp grid (kMissing where absent).
std::vector<double> align_to(const Series& series, const std::vector<Timestamp>& grid);

enum class IndexWeighting { Equal, Capitalization };

/// Cross-sectional aggregate of the observed returns at every timestamp.
/// Capitalization weighting ignores stocks without a capitalization.
Series aggregate_index(const ReturnPanel& panel, IndexWeighting weighting = IndexWeighting::Equal);

} // namespace rmtcorr
