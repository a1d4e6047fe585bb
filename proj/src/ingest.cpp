#include "rmtcorr/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <unordered_map>

#include "csv.hpp"

namespace rmtcorr {

namespace {

std::string where(std::string_view source, std::size_t line)
{
    return std::string(source) + ":" + std::to_string(line);
}

} // namespace

std::vector<BarSeries> parse_bar_file(std::istream& in, std::string_view source_name)
{
    csv::LineReader reader(in);
    auto header = reader.next();
    if (!header || *header != std::vector<std::string>{"ticker", "date", "time", "close"})
        throw Error(ErrorCode::MalformedHeader,
                    where(source_name, 1) + ": expected header 'ticker,date,time,close'");

    std::map<std::string, std::vector<Bar>> by_ticker;
    while (auto fields = reader.next()) {
        const auto line = reader.line_number();
        if (fields->size() == 1 && fields->front().empty())
            continue;
        if (fields->size() != 4)
            throw Error(ErrorCode::MalformedRow, where(source_name, line) + ": expected 4 fields");
        const auto& ticker = (*fields)[0];
        if (ticker.empty())
            throw Error(ErrorCode::MalformedRow, where(source_name, line) + ": empty ticker");
        auto day = parse_date((*fields)[1]);
        auto minute = parse_time((*fields)[2]);
        auto price = csv::parse_double((*fields)[3]);
        if (!day || !minute || !price)
            throw Error(ErrorCode::MalformedRow, where(source_name, line) + ": unparseable field");
        if (!(*price > 0.0) || !std::isfinite(*price))
            throw Error(ErrorCode::NonPositivePrice,
                        where(source_name, line) + ": price " + (*fields)[3] + " for " + ticker);
        by_ticker[ticker].push_back(Bar{Timestamp{*day, *minute}, *price});
    }

    std::vector<BarSeries> out;
    out.reserve(by_ticker.size());
    for (auto& [ticker, bars] : by_ticker) {
        std::stable_sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) { return a.ts < b.ts; });
        for (std::size_t k = 1; k < bars.size(); ++k) {
            if (bars[k].ts == bars[k - 1].ts)
                throw Error(ErrorCode::DuplicateBar, std::string(source_name) + ": " + ticker + " " +
                                                         format_date(bars[k].ts.day) + " " +
                                                         format_time(bars[k].ts.minute));
        }
        out.push_back(BarSeries{ticker, std::move(bars)});
    }
    return out;
}

std::vector<StockMeta> parse_meta_file(std::istream& in, std::string_view source_name)
{
    csv::LineReader reader(in);
    auto header = reader.next();
    if (!header || *header != std::vector<std::string>{"ticker", "exchange", "sector", "capitalization"})
        throw Error(ErrorCode::MalformedHeader,
                    where(source_name, 1) + ": expected header 'ticker,exchange,sector,capitalization'");

    std::vector<StockMeta> out;
    std::set<std::string> seen;
    while (auto fields = reader.next()) {
        const auto line = reader.line_number();
        if (fields->size() == 1 && fields->front().empty())
            continue;
        if (fields->size() != 4)
            throw Error(ErrorCode::MalformedRow, where(source_name, line) + ": expected 4 fields");
        StockMeta m;
        m.ticker = (*fields)[0];
        m.exchange = parse_exchange((*fields)[1]);
        m.sector = (*fields)[2];
        if (!(*fields)[3].empty()) {
            auto cap = csv::parse_double((*fields)[3]);
            if (!cap || !(*cap > 0.0) || !std::isfinite(*cap))
                throw Error(ErrorCode::MalformedRow,
                            where(source_name, line) + ": capitalization must be a positive number");
            m.capitalization = *cap;
        }
        if (!seen.insert(m.ticker).second)
            throw Error(ErrorCode::MalformedRow, where(source_name, line) + ": duplicate ticker " + m.ticker);
        out.push_back(std::move(m));
    }
    return out;
}

Series compute_intraday_returns(const BarSeries& series)
{
    Series out;
    const auto& bars = series.bars;
    for (std::size_t k = 1; k < bars.size(); ++k) {
        if (bars[k].ts.day != bars[k - 1].ts.day)
            continue;
        out.push_back(bars[k].ts, std::log(bars[k].price) - std::log(bars[k - 1].price));
    }
    return out;
}

ReturnPanel build_panel(const std::vector<TickerReturns>& series_returns, const std::vector<StockMeta>& meta)
{
    std::unordered_map<std::string_view, const StockMeta*> meta_by_ticker;
    for (const auto& m : meta)
        meta_by_ticker.emplace(m.ticker, &m);

    std::vector<Timestamp> grid;
    for (const auto& s : series_returns)
        grid.insert(grid.end(), s.returns.timestamps.begin(), s.returns.timestamps.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<std::string> tickers;
    std::vector<StockMeta> row_meta;
    Grid values = Grid::Constant(series_returns.size(), grid.size(), kMissing);
    for (std::size_t i = 0; i < series_returns.size(); ++i) {
        const auto& s = series_returns[i];
        auto it = meta_by_ticker.find(s.ticker);
        if (it == meta_by_ticker.end())
            throw Error(ErrorCode::MetaMissing, "no metadata for ticker " + s.ticker);
        tickers.push_back(s.ticker);
        row_meta.push_back(*it->second);
        std::size_t k = 0;
        for (std::size_t j = 0; j < s.returns.size(); ++j) {
            const auto ts = s.returns.timestamps[j];
            k = static_cast<std::size_t>(std::lower_bound(grid.begin() + static_cast<std::ptrdiff_t>(k),
                                                          grid.end(), ts) -
                                         grid.begin());
            values(i, k) = s.returns.values[j];
        }
    }
    return ReturnPanel(std::move(tickers), std::move(grid), std::move(values), std::move(row_meta));
}

ReturnPanel filter_universe(const ReturnPanel& panel, std::size_t min_days, std::size_t min_obs)
{
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
        if (panel.active_days(i) >= min_days && panel.observed_count(i) >= min_obs && !panel.zero_variance(i))
            keep.push_back(i);
    }
    if (keep.empty())
        throw Error(ErrorCode::EmptyUniverse, "no stock meets min_days=" + std::to_string(min_days) +
                                                  ", min_obs=" + std::to_string(min_obs));
    if (keep.size() == panel.n_stocks())
        return panel;
    return panel.select_rows(keep);
}

} // namespace rmtcorr
