#include "rmtcorr/panel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace rmtcorr {

std::string_view to_string(Exchange e) noexcept
{
    switch (e) {
    case Exchange::SZSE: return "SZSE";
    case Exchange::SHSE: return "SHSE";
    case Exchange::OTHER: return "OTHER";
    }
    return "OTHER";
}

Exchange parse_exchange(std::string_view text) noexcept
{
    if (text == "SZSE")
        return Exchange::SZSE;
    if (text == "SHSE")
        return Exchange::SHSE;
    return Exchange::OTHER;
}

ReturnPanel::ReturnPanel(std::vector<std::string> tickers, std::vector<Timestamp> timestamps,
                         Grid values, std::vector<StockMeta> meta)
    : tickers_(std::move(tickers)),
      timestamps_(std::move(timestamps)),
      values_(std::move(values)),
      meta_(std::move(meta))
{
    const auto n = tickers_.size();
    const auto t = timestamps_.size();
    if (static_cast<std::size_t>(values_.rows()) != n || static_cast<std::size_t>(values_.cols()) != t)
        throw Error(ErrorCode::InvalidConfig, "panel values shape does not match tickers x timestamps");
    if (meta_.size() != n)
        throw Error(ErrorCode::MetaMissing, "panel metadata count does not match ticker count");

    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen.insert(tickers_[i]).second)
            throw Error(ErrorCode::InvalidConfig, "duplicate ticker in panel: " + tickers_[i]);
        if (meta_[i].ticker != tickers_[i])
            throw Error(ErrorCode::MetaMissing, "metadata row order does not match ticker " + tickers_[i]);
    }
    for (std::size_t k = 1; k < t; ++k) {
        if (!(timestamps_[k - 1] < timestamps_[k]))
            throw Error(ErrorCode::InvalidConfig, "panel timestamps must be strictly increasing");
    }

    std::vector<bool> column_seen(t, false);
    zero_variance_.assign(n, false);
    observed_.assign(n, 0);
    active_days_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = row(i);
        std::optional<double> first;
        bool constant = true;
        std::optional<std::int32_t> last_day;
        for (std::size_t k = 0; k < t; ++k) {
            const double v = r[k];
            if (is_missing(v))
                continue;
            if (!std::isfinite(v))
                throw Error(ErrorCode::MalformedRow, "non-finite return for " + tickers_[i]);
            column_seen[k] = true;
            ++observed_[i];
            if (!first)
                first = v;
            else if (v != *first)
                constant = false;
            if (last_day != timestamps_[k].day) {
                ++active_days_[i];
                last_day = timestamps_[k].day;
            }
        }
        zero_variance_[i] = constant;
    }
    if (n > 0) {
        for (std::size_t k = 0; k < t; ++k) {
            if (!column_seen[k])
                throw Error(ErrorCode::InvalidConfig,
                            "panel column " + format_date(timestamps_[k].day) + " " +
                                format_time(timestamps_[k].minute) + " has no observations");
        }
    }
}

std::size_t ReturnPanel::missing_count() const noexcept
{
    std::size_t observed = 0;
    for (auto c : observed_)
        observed += c;
    return n_stocks() * n_times() - observed;
}

std::optional<std::size_t> ReturnPanel::find(std::string_view ticker) const
{
    for (std::size_t i = 0; i < tickers_.size(); ++i) {
        if (tickers_[i] == ticker)
            return i;
    }
    return std::nullopt;
}

Series ReturnPanel::row_series(std::size_t stock) const
{
    Series s;
    const auto r = row(stock);
    for (std::size_t k = 0; k < n_times(); ++k) {
        if (!is_missing(r[k]))
            s.push_back(timestamps_[k], r[k]);
    }
    return s;
}

ReturnPanel ReturnPanel::select_rows(std::span<const std::size_t> rows) const
{
    std::vector<std::size_t> keep_cols;
    for (std::size_t k = 0; k < n_times(); ++k) {
        for (auto i : rows) {
            if (!is_missing(values_(i, k))) {
                keep_cols.push_back(k);
                break;
            }
        }
    }
    std::vector<std::string> tickers;
    std::vector<StockMeta> meta;
    Grid values(rows.size(), keep_cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        tickers.push_back(tickers_[rows[a]]);
        meta.push_back(meta_[rows[a]]);
        for (std::size_t b = 0; b < keep_cols.size(); ++b)
            values(a, b) = values_(rows[a], keep_cols[b]);
    }
    std::vector<Timestamp> ts;
    ts.reserve(keep_cols.size());
    for (auto k : keep_cols)
        ts.push_back(timestamps_[k]);
    return ReturnPanel(std::move(tickers), std::move(ts), std::move(values), std::move(meta));
}

ReturnPanel ReturnPanel::select_timestamps(std::span<const std::size_t> cols) const
{
    Grid values(static_cast<Eigen::Index>(n_stocks()), static_cast<Eigen::Index>(cols.size()));
    std::vector<Timestamp> ts;
    ts.reserve(cols.size());
    for (std::size_t b = 0; b < cols.size(); ++b) {
        ts.push_back(timestamps_[cols[b]]);
        values.col(static_cast<Eigen::Index>(b)) = values_.col(static_cast<Eigen::Index>(cols[b]));
    }
    return ReturnPanel(tickers_, std::move(ts), std::move(values), meta_);
}

ReturnPanel ReturnPanel::common_timestamps() const
{
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < n_times(); ++k) {
        bool all = true;
        for (std::size_t i = 0; i < n_stocks() && all; ++i)
            all = !is_missing(values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
        if (all)
            keep.push_back(k);
    }
    return select_timestamps(keep);
}

std::vector<double> align_to(const Series& series, const std::vector<Timestamp>& grid)
{
    std::vector<double> out(grid.size(), kMissing);
    std::size_t j = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        while (j < series.size() && series.timestamps[j] < grid[k])
            ++j;
        if (j < series.size() && series.timestamps[j] == grid[k])
            out[k] = series.values[j];
    }
    return out;
}

Series aggregate_index(const ReturnPanel& panel, IndexWeighting weighting)
{
    Series out;
    for (std::size_t k = 0; k < panel.n_times(); ++k) {
        double sum = 0.0;
        double weight = 0.0;
        for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
            const double v = panel.at(i, k);
            if (is_missing(v))
                continue;
            double w = 1.0;
            if (weighting == IndexWeighting::Capitalization) {
                const auto& cap = panel.meta()[i].capitalization;
                if (!cap)
                    continue;
                w = *cap;
            }
            sum += w * v;
            weight += w;
        }
        if (weight > 0.0)
            out.push_back(panel.timestamps()[k], sum / weight);
    }
    return out;
}

} // namespace rmtcorr
