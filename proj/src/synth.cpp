#include "rmtcorr/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace rmtcorr {

void SynthConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
    if (n_stocks < 2)
        fail("n_stocks must be >= 2");
    if (n_days < 1)
        fail("n_days must be >= 1");
    if (minutes_per_day < 1 || session_open < 0 || session_open + static_cast<std::int64_t>(minutes_per_day) > 1439)
        fail("session must fit in one day: session_open + minutes_per_day <= 23:59");
    if (!(beta_lo > 0.0) || !(beta_hi >= beta_lo))
        fail("beta range must satisfy hi >= lo > 0");
    if (!(market_vol > 0.0) || !(idio_vol > 0.0))
        fail("market_vol and idio_vol must be > 0");
    if (!(group_factor_strength >= 0.0))
        fail("group_factor_strength must be >= 0");
    if (!(group_fraction > 0.0 && group_fraction < 1.0))
        fail("group_fraction must lie in (0, 1)");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0))
        fail("missing_rate must lie in [0, 1)");
    std::size_t assigned = 0;
    for (const auto& b : sector_blocks) {
        if (!(b.strength >= 0.0))
            fail("sector block strength must be >= 0");
        assigned += b.size;
    }
    if (assigned > n_stocks)
        fail("sector blocks cover more stocks than n_stocks");
}

SynthMarket generate_factor_market(const SynthConfig& config)
{
    config.validate();
    const auto n = config.n_stocks;

    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32), 0u};
    std::mt19937_64 rng(seq);
    // Missingness draws use their own stream so returns do not depend on missing_rate.
    std::seed_seq seq_missing{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                              1u};
    std::mt19937_64 rng_missing(seq_missing);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    SynthMarket out;
    auto& truth = out.truth;
    const auto n_group_a = static_cast<std::size_t>(std::llround(config.group_fraction * static_cast<double>(n)));
    std::vector<double> group_loading(n);
    std::vector<int> sector_of(n, -1);
    {
        std::size_t i = 0;
        for (std::size_t b = 0; b < config.sector_blocks.size(); ++b) {
            for (std::size_t m = 0; m < config.sector_blocks[b].size; ++m)
                sector_of[i++] = static_cast<int>(b);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double log10_cap = 9.0 + 2.0 * uniform(rng);
        truth.capitalizations.push_back(std::pow(10.0, log10_cap));
        truth.betas.push_back(config.beta_lo + (config.beta_hi - config.beta_lo) * (log10_cap - 9.0) / 2.0);
        const int group = i < n_group_a ? 0 : 1;
        truth.group_labels.push_back(group);
        group_loading[i] = group == 0 ? config.group_factor_strength : -config.group_factor_strength;
        std::string sector = sector_of[i] < 0 ? std::string("Z") : std::string(1, static_cast<char>('A' + sector_of[i] % 25));
        if (sector_of[i] >= 25)
            sector += std::to_string(sector_of[i] / 25);
        truth.sector_labels.push_back(sector);

        char ticker[24];
        std::snprintf(ticker, sizeof ticker, "S%05zu", i + 1);
        out.meta.push_back(StockMeta{ticker, group == 0 ? Exchange::SZSE : Exchange::SHSE, truth.sector_labels.back(),
                                     truth.capitalizations.back()});
        out.bars.push_back(BarSeries{ticker, {}});
        out.bars.back().bars.reserve(config.n_days * (config.minutes_per_day + 1));
    }

    std::vector<double> price(n, 10.0);
    std::vector<double> sector_draw(config.sector_blocks.size());
    std::int32_t day = config.first_day;
    for (std::size_t d = 0; d < config.n_days; ++d) {
        // Trading days are weekdays; 1970-01-01 was a Thursday.
        while ((day + 3) % 7 >= 5)
            ++day;
        for (std::size_t m = 0; m <= config.minutes_per_day; ++m) {
            const Timestamp ts{day, config.session_open + static_cast<std::int32_t>(m)};
            if (m > 0) {
                const double f = config.market_vol * normal(rng);
                const double h = normal(rng);
                for (auto& z : sector_draw)
                    z = normal(rng);
                truth.factor.push_back(ts, f);
                truth.group_factor.push_back(ts, h);
                for (std::size_t i = 0; i < n; ++i) {
                    double r = truth.betas[i] * f + group_loading[i] * h + config.idio_vol * normal(rng);
                    if (sector_of[i] >= 0)
                        r += config.sector_blocks[static_cast<std::size_t>(sector_of[i])].strength *
                             sector_draw[static_cast<std::size_t>(sector_of[i])];
                    price[i] *= std::exp(r);
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                const bool absent = config.missing_rate > 0.0 && uniform(rng_missing) < config.missing_rate;
                if (!absent)
                    out.bars[i].bars.push_back(Bar{ts, price[i]});
            }
        }
        ++day;
    }

    std::vector<TickerReturns> returns;
    returns.reserve(n);
    for (const auto& s : out.bars)
        returns.push_back(TickerReturns{s.ticker, compute_intraday_returns(s)});
    out.panel = build_panel(returns, out.meta);
    return out;
}

} // namespace rmtcorr
