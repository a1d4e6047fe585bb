#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmtcorr/panel.hpp"

namespace rmtcorr {

/// Which timestamps an entry is estimated on.
enum class SampleMode {
    Pairwise, ///< each pair uses the timestamps both stocks observe
    Listwise, ///< every pair uses the timestamps all stocks observe (PSD)
};

/// What to do when a pair is not estimable (too few joint points or a
/// constant series on the joint sample).
enum class OverlapPolicy {
    Strict,  ///< throw InsufficientOverlap
    Lenient, ///< set the entry to 0 and list it in undefined_pairs
};

struct CorrelationOptions {
    std::size_t min_overlap = 100;
    SampleMode sample = SampleMode::Pairwise;
    OverlapPolicy policy = OverlapPolicy::Strict;
    unsigned jobs = 1;
};

/**
 * Symmetric correlation matrix with exact unit diagonal.
 *
 * overlap(i, j) is the number of timestamps entry (i, j) was estimated on.
 * Pairwise-complete matrices are not guaranteed to be positive
 * semidefinite; listwise ones are.
 */
struct CorrelationMatrix {
    MatrixKind kind = MatrixKind::Raw;
    std::vector<std::string> tickers;
    Eigen::MatrixXd entries;
    CountMatrix overlap;
    std::optional<std::string> conditioning_label;
    std::vector<std::pair<std::size_t, std::size_t>> undefined_pairs;

    std::size_t n() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

/// One-index OLS fit per stock: r_i = alpha_i + beta_i * r_m + eps_i.
struct FactorFit {
    std::vector<std::string> tickers;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<Timestamp> timestamps;
    /// Residuals on the panel grid; MISSING wherever stock or index is absent.
    Grid residuals;
    std::string index_label;
};

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<double> densities;
};

struct CoefficientSummary {
    Histogram histogram;
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double negative_fraction = 0.0;
};

/// Pearson correlation of every stock pair (population moments).
CorrelationMatrix pairwise_correlation(const ReturnPanel& panel, const CorrelationOptions& options = {});

/// Same estimator over an arbitrary stocks x time grid with MISSING cells.
CorrelationMatrix correlate_rows(const Grid& rows, const std::vector<std::string>& tickers,
                                 const CorrelationOptions& options, MatrixKind kind);

FactorFit fit_factor(const ReturnPanel& panel, const Series& index_returns, std::string index_label = "index");

/// Correlation of the residuals (definition route).
CorrelationMatrix partial_correlation_direct(const FactorFit& fit, const CorrelationOptions& options = {});

/// c_im for every stock against the index, each on its own joint sample
/// (or on the all-observed sample in listwise mode).
std::vector<double> index_correlations(const ReturnPanel& panel, const Series& index_returns,
                                       const CorrelationOptions& options = {});

/// rho_ij = (c_ij - c_im c_jm) / sqrt((1 - c_im^2)(1 - c_jm^2)).
CorrelationMatrix partial_correlation_closed_form(const CorrelationMatrix& raw, std::span<const double> index_corr,
                                                  std::string index_label = "index");

/// Density histogram and summary statistics of the upper-triangle entries
/// (undefined pairs excluded). The range spans [min, max] of the entries.
CoefficientSummary coefficient_histogram(const CorrelationMatrix& matrix, std::size_t bin_count);

} // namespace rmtcorr
