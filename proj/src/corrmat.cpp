#include "rmtcorr/corrmat.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "stats.hpp"

namespace rmtcorr {

namespace {

// Per-row outcome collected by worker threads and merged in row order so
// the result never depends on scheduling.
struct RowOutcome {
    std::vector<std::size_t> undefined_cols;
    std::vector<std::int64_t> undefined_counts;
};

template <typename Fn>
void for_each_row(std::size_t n, unsigned jobs, Fn&& fn)
{
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers)
                fn(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

Grid listwise_columns(const Grid& rows, const std::vector<double>* extra = nullptr)
{
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < rows.cols(); ++k) {
        bool all = !extra || !is_missing((*extra)[static_cast<std::size_t>(k)]);
        for (Eigen::Index i = 0; i < rows.rows() && all; ++i)
            all = !is_missing(rows(i, k));
        if (all)
            keep.push_back(k);
    }
    Grid out(rows.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t b = 0; b < keep.size(); ++b)
        out.col(static_cast<Eigen::Index>(b)) = rows.col(keep[b]);
    return out;
}

} // namespace

CorrelationMatrix correlate_rows(const Grid& input, const std::vector<std::string>& tickers,
                                 const CorrelationOptions& options, MatrixKind kind)
{
    const auto n = static_cast<std::size_t>(input.rows());
    if (n == 0)
        throw Error(ErrorCode::EmptyMatrix, "cannot correlate an empty panel");
    if (options.min_overlap < 2)
        throw Error(ErrorCode::InvalidConfig, "min_overlap must be >= 2");

    const Grid listwise = options.sample == SampleMode::Listwise ? listwise_columns(input) : Grid{};
    const Grid& rows = options.sample == SampleMode::Listwise ? listwise : input;
    const auto t = static_cast<std::size_t>(rows.cols());

    CorrelationMatrix out;
    out.kind = kind;
    out.tickers = tickers;
    out.entries = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.overlap = CountMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    std::vector<RowOutcome> outcomes(n);
    for_each_row(n, options.jobs, [&](std::size_t i) {
        const double* x = rows.data() + i * t;
        auto& outcome = outcomes[i];
        const auto ii = static_cast<Eigen::Index>(i);
        out.overlap(ii, ii) = static_cast<std::int64_t>(stats::pearson_pair(x, x, t).n);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto pair = stats::pearson_pair(x, rows.data() + j * t, t);
            const auto jj = static_cast<Eigen::Index>(j);
            out.overlap(ii, jj) = static_cast<std::int64_t>(pair.n);
            if (pair.n < options.min_overlap || !pair.defined) {
                outcome.undefined_cols.push_back(j);
                outcome.undefined_counts.push_back(static_cast<std::int64_t>(pair.n));
                out.entries(ii, jj) = 0.0;
            } else {
                out.entries(ii, jj) = pair.corr;
            }
        }
    });

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < outcomes[i].undefined_cols.size(); ++a) {
            const auto j = outcomes[i].undefined_cols[a];
            if (options.policy == OverlapPolicy::Strict) {
                const auto count = outcomes[i].undefined_counts[a];
                const std::string reason = static_cast<std::size_t>(count) < options.min_overlap
                                               ? "joint count " + std::to_string(count) + " < min_overlap " +
                                                     std::to_string(options.min_overlap)
                                               : "zero variance on joint sample";
                throw Error(ErrorCode::InsufficientOverlap,
                            "pair (" + tickers[i] + ", " + tickers[j] + "): " + reason);
            }
            out.undefined_pairs.emplace_back(i, j);
        }
    }

    // Mirror the computed upper triangle; symmetry is exact by construction.
    for (Eigen::Index i = 0; i < out.entries.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < out.entries.cols(); ++j) {
            out.entries(j, i) = out.entries(i, j);
            out.overlap(j, i) = out.overlap(i, j);
        }
    }
    return out;
}

CorrelationMatrix pairwise_correlation(const ReturnPanel& panel, const CorrelationOptions& options)
{
    return correlate_rows(panel.values(), panel.tickers(), options, MatrixKind::Raw);
}

FactorFit fit_factor(const ReturnPanel& panel, const Series& index_returns, std::string index_label)
{
    const auto n = panel.n_stocks();
    const auto t = panel.n_times();
    const auto index = align_to(index_returns, panel.timestamps());

    FactorFit fit;
    fit.tickers = panel.tickers();
    fit.timestamps = panel.timestamps();
    fit.index_label = std::move(index_label);
    fit.alpha.assign(n, 0.0);
    fit.beta.assign(n, 0.0);
    fit.residuals = Grid::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t), kMissing);

    for (std::size_t i = 0; i < n; ++i) {
        const auto r = panel.row(i);
        const auto ols = stats::ols_pair(index.data(), r.data(), t);
        if (ols.n < 2 || ols.sxx <= 0.0)
            throw Error(ErrorCode::DegenerateIndex, "index has zero variance on the joint sample of " +
                                                        panel.tickers()[i] + " (" + std::to_string(ols.n) +
                                                        " points)");
        double beta = ols.sxy / ols.sxx;
        double alpha = ols.mean_y - beta * ols.mean_x;
        bool exact = false;
        if (ols.y_constant) {
            beta = 0.0;
            alpha = ols.first_y;
            exact = true;
        }

        double rss = 0.0;
        for (std::size_t k = 0; k < t; ++k) {
            if (is_missing(index[k]) || is_missing(r[k]))
                continue;
            const double e = r[k] - alpha - beta * index[k];
            fit.residuals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = e;
            rss += e * e;
        }
        // A fit that explains the series to rounding error leaves pure noise
        // at the 1e-16 level; snap it so downstream sees an exact constant.
        if (exact || rss <= 1e-24 * ols.syy) {
            for (std::size_t k = 0; k < t; ++k) {
                auto& cell = fit.residuals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
                if (!is_missing(cell))
                    cell = 0.0;
            }
        }
        fit.alpha[i] = alpha;
        fit.beta[i] = beta;
    }
    return fit;
}

CorrelationMatrix partial_correlation_direct(const FactorFit& fit, const CorrelationOptions& options)
{
    auto out = correlate_rows(fit.residuals, fit.tickers, options, MatrixKind::Partial);
    out.conditioning_label = fit.index_label;
    return out;
}

std::vector<double> index_correlations(const ReturnPanel& panel, const Series& index_returns,
                                       const CorrelationOptions& options)
{
    const auto index = align_to(index_returns, panel.timestamps());
    const Grid listwise = options.sample == SampleMode::Listwise ? listwise_columns(panel.values(), &index) : Grid{};
    std::vector<double> listwise_index;
    if (options.sample == SampleMode::Listwise) {
        for (std::size_t k = 0; k < index.size(); ++k) {
            bool all = !is_missing(index[k]);
            for (std::size_t i = 0; i < panel.n_stocks() && all; ++i)
                all = !is_missing(panel.at(i, k));
            if (all)
                listwise_index.push_back(index[k]);
        }
    }
    const Grid& rows = options.sample == SampleMode::Listwise ? listwise : panel.values();
    const double* idx = options.sample == SampleMode::Listwise ? listwise_index.data() : index.data();
    const auto t = static_cast<std::size_t>(rows.cols());

    std::vector<double> out(panel.n_stocks());
    for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
        const auto pair = stats::pearson_pair(rows.data() + i * t, idx, t);
        if (pair.n < options.min_overlap)
            throw Error(ErrorCode::InsufficientOverlap,
                        "pair (" + panel.tickers()[i] + ", index): joint count " + std::to_string(pair.n));
        if (!pair.defined) {
            if (pair.y_constant)
                throw Error(ErrorCode::DegenerateIndex,
                            "index has zero variance on the joint sample of " + panel.tickers()[i]);
            throw Error(ErrorCode::InsufficientOverlap,
                        "pair (" + panel.tickers()[i] + ", index): zero variance on joint sample");
        }
        out[i] = pair.corr;
    }
    return out;
}

CorrelationMatrix partial_correlation_closed_form(const CorrelationMatrix& raw, std::span<const double> index_corr,
                                                  std::string index_label)
{
    if (raw.kind != MatrixKind::Raw)
        throw Error(ErrorCode::InvalidConfig, "closed-form partial correlation needs a RAW matrix");
    const auto n = raw.n();
    if (index_corr.size() != n)
        throw Error(ErrorCode::InvalidConfig, "index correlation vector length does not match matrix");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(index_corr[i]) < 1.0 - 1e-12))
            throw Error(ErrorCode::IndexColinearStock,
                        "stock " + (i < raw.tickers.size() ? raw.tickers[i] : std::to_string(i)) +
                            " has |c_im| = " + format_double(std::abs(index_corr[i])));
    }

    CorrelationMatrix out;
    out.kind = MatrixKind::Partial;
    out.tickers = raw.tickers;
    out.overlap = raw.overlap;
    out.undefined_pairs = raw.undefined_pairs;
    out.conditioning_label = std::move(index_label);
    out.entries = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i)
        scale[i] = std::sqrt(1.0 - index_corr[i] * index_corr[i]);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            double rho = (raw.entries(ii, jj) - index_corr[i] * index_corr[j]) / (scale[i] * scale[j]);
            rho = std::clamp(rho, -1.0, 1.0);
            out.entries(ii, jj) = rho;
            out.entries(jj, ii) = rho;
        }
    }
    for (auto [i, j] : raw.undefined_pairs) {
        out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.0;
        out.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 0.0;
    }
    return out;
}

CoefficientSummary coefficient_histogram(const CorrelationMatrix& matrix, std::size_t bin_count)
{
    if (bin_count < 1)
        throw Error(ErrorCode::InvalidConfig, "bin_count must be >= 1");
    const auto n = matrix.n();
    if (n < 2)
        throw Error(ErrorCode::EmptyMatrix, "need at least a 2x2 matrix for coefficient statistics");

    std::vector<bool> undefined(n * n, false);
    for (auto [i, j] : matrix.undefined_pairs) {
        undefined[i * n + j] = true;
        undefined[j * n + i] = true;
    }
    std::vector<double> values;
    values.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!undefined[i * n + j])
                values.push_back(matrix.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
    if (values.empty())
        throw Error(ErrorCode::EmptyMatrix, "every off-diagonal entry is undefined");

    CoefficientSummary s;
    s.count = values.size();
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    s.min = *lo_it;
    s.max = *hi_it;
    double sum = 0.0;
    std::size_t negative = 0;
    for (double v : values) {
        sum += v;
        if (v < 0.0)
            ++negative;
    }
    s.mean = sum / static_cast<double>(values.size());
    s.negative_fraction = static_cast<double>(negative) / static_cast<double>(values.size());

    // All-equal entries get a narrow symmetric range so the density stays finite.
    double lo = s.min;
    double hi = s.max;
    if (!(hi > lo)) {
        lo -= 1e-3;
        hi += 1e-3;
    }
    const double width = (hi - lo) / static_cast<double>(bin_count);
    std::vector<std::size_t> counts(bin_count, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(b, bin_count - 1)]++;
    }
    s.histogram.bin_edges.resize(bin_count + 1);
    for (std::size_t b = 0; b <= bin_count; ++b)
        s.histogram.bin_edges[b] = b == bin_count ? hi : lo + width * static_cast<double>(b);
    s.histogram.densities.resize(bin_count);
    for (std::size_t b = 0; b < bin_count; ++b) {
        const double w = s.histogram.bin_edges[b + 1] - s.histogram.bin_edges[b];
        s.histogram.densities[b] = static_cast<double>(counts[b]) / (static_cast<double>(values.size()) * w);
    }
    return s;
}

} // namespace rmtcorr
