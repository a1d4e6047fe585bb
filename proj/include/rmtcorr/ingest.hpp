#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rmtcorr/panel.hpp"

namespace rmtcorr {

struct Bar {
    Timestamp ts;
    double price = 0.0;
};

/// One ticker's bars, strictly ordered by (day, minute), all prices > 0.
struct BarSeries {
    std::string ticker;
    std::vector<Bar> bars;
};

struct TickerReturns {
    std::string ticker;
    Series returns;
};

/// Reads a `ticker,date,time,close` minute-bar CSV. Output is one series per
/// ticker, tickers in lexicographic order, bars sorted.
std::vector<BarSeries> parse_bar_file(std::istream& in, std::string_view source_name = "<stream>");

/// Reads a `ticker,exchange,sector,capitalization` CSV. An empty
/// capitalization field means "not available".
std::vector<StockMeta> parse_meta_file(std::istream& in, std::string_view source_name = "<stream>");

/// Log-returns between consecutive bars of the same trading day, keyed by
/// the later bar. The first bar of every day produces nothing.
Series compute_intraday_returns(const BarSeries& series);

/// Aligns per-ticker return lists on the sorted union of their timestamps.
/// Rows follow the order of `series_returns`.
ReturnPanel build_panel(const std::vector<TickerReturns>& series_returns, const std::vector<StockMeta>& meta);

/// Keeps stocks with at least `min_days` active trading days, at least
/// `min_obs` observed returns, and nonzero return variance. Throws
/// EmptyUniverse when nothing survives.
ReturnPanel filter_universe(const ReturnPanel& panel, std::size_t min_days, std::size_t min_obs);

} // namespace rmtcorr
