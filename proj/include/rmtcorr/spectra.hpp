#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rmtcorr/corrmat.hpp"

namespace rmtcorr {

/**
 * Full symmetric eigendecomposition.
 *
 * eigenvalues are sorted descending; column k of eigenvectors is the unit
 * eigenvector for eigenvalues[k]. Each column is sign-normalized so its
 * component sum is >= 0; when that sum vanishes the largest-magnitude
 * component is made positive instead.
 */
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    MatrixKind source_kind = MatrixKind::Raw;
    int sweeps = 0;

    std::size_t n() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    std::span<const double> vector(std::size_t k) const
    {
        return {eigenvectors.data() + k * n(), n()};
    }
};

struct JacobiOptions {
    /// Stop once off-diagonal Frobenius norm <= tolerance * ||C||_F.
    double tolerance = 1e-12;
    int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver. Throws ConvergenceFailure past max_sweeps.
SpectralDecomposition eigendecompose(const Eigen::MatrixXd& matrix, MatrixKind kind = MatrixKind::Raw,
                                     const JacobiOptions& options = {});
SpectralDecomposition eigendecompose(const CorrelationMatrix& matrix, const JacobiOptions& options = {});

/// Marchenko-Pastur support for Q = T/N.
struct MPReference {
    double q = 1.0;
    double lambda_min = 0.0;
    double lambda_max = 4.0;
};

MPReference mp_bounds(double q);

/// f(lambda) = Q / (2 pi) * sqrt((lambda_max - lambda)(lambda - lambda_min)) / lambda
/// inside the support, 0 outside.
double mp_density(double lambda, double q);

struct DeviationReport {
    std::size_t n = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double lambda_1 = 0.0;
    std::size_t n_below = 0;
    std::size_t n_above = 0;
    double pct_below = 0.0;
    double pct_above = 0.0;
    /// lambda_1 / N.
    double absorption_ratio = 0.0;
    /// lambda_1 / sum(lambda); equals absorption_ratio when the trace is N.
    double lambda1_variance_fraction = 0.0;
    double trace = 0.0;
    std::vector<std::pair<std::size_t, double>> variance_fractions;
};

/// Counts eigenvalues strictly outside [lambda_min, lambda_max] (a value equal
/// to a bound is inside). `ranks` are 1-based.
DeviationReport deviation_report(const SpectralDecomposition& decomp, const MPReference& ref,
                                 std::span<const std::size_t> ranks = {});

/// Shuffles every stock's observed returns among its own observed slots,
/// preserving the missing pattern. Deterministic in (seed, realization).
ReturnPanel shuffled_panel(const ReturnPanel& panel, std::uint64_t seed, std::uint64_t realization);

/// Decompositions of the RAW matrices of independently shuffled panels.
std::vector<SpectralDecomposition> shuffle_null(const ReturnPanel& panel, std::size_t realizations,
                                                std::uint64_t seed, const CorrelationOptions& options = {});

} // namespace rmtcorr
