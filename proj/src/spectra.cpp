#include "rmtcorr/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace rmtcorr {

namespace {

void jacobi_rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, Eigen::Index p, Eigen::Index q)
{
    const double apq = a(p, q);
    const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const Eigen::Index n = a.rows();

    for (Eigen::Index k = 0; k < n; ++k) {
        if (k == p || k == q)
            continue;
        const double akp = a(k, p);
        const double akq = a(k, q);
        const double new_kp = c * akp - s * akq;
        const double new_kq = s * akp + c * akq;
        a(k, p) = new_kp;
        a(p, k) = new_kp;
        a(k, q) = new_kq;
        a(q, k) = new_kq;
    }
    a(p, p) -= t * apq;
    a(q, q) += t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;

    double* vp = v.col(p).data();
    double* vq = v.col(q).data();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = vp[k];
        const double y = vq[k];
        vp[k] = c * x - s * y;
        vq[k] = s * x + c * y;
    }
}

double off_diagonal_norm(const Eigen::MatrixXd& a)
{
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j)
                sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}

std::size_t first_significant(const Eigen::MatrixXd& vecs, Eigen::Index col)
{
    for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
        if (std::abs(vecs(i, col)) > 1e-8)
            return static_cast<std::size_t>(i);
    }
    return static_cast<std::size_t>(vecs.rows());
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> u)
{
    const double sum = u.sum();
    if (sum < -1e-9) {
        u = -u;
        return;
    }
    if (sum > 1e-9)
        return;
    // Balanced vector: make the largest-magnitude component (first on ties) positive.
    const double peak = u.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (std::abs(u(i)) >= peak - 1e-12) {
            if (u(i) < 0.0)
                u = -u;
            return;
        }
    }
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound)
{
    // Rejection sampling keeps the draw unbiased and platform independent.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

} // namespace

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& matrix, MatrixKind kind, const JacobiOptions& options)
{
    const Eigen::Index n = matrix.rows();
    if (n == 0 || matrix.cols() != n)
        throw Error(ErrorCode::EmptyMatrix, "eigendecomposition needs a nonempty square matrix");
    if (!matrix.allFinite())
        throw Error(ErrorCode::ConvergenceFailure, "matrix has non-finite entries");

    Eigen::MatrixXd a = 0.5 * (matrix + matrix.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double norm = a.norm();
    const double target = options.tolerance * norm;
    const double skip = target / static_cast<double>(std::max<Eigen::Index>(n, 1)) * 1e-2;

    int sweep = 0;
    while (off_diagonal_norm(a) > target) {
        if (sweep >= options.max_sweeps)
            throw Error(ErrorCode::ConvergenceFailure,
                        "Jacobi did not converge within " + std::to_string(options.max_sweeps) + " sweeps");
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) > skip)
                    jacobi_rotate(a, v, p, q);
            }
        }
        ++sweep;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

    // Within a degenerate cluster, order by the first significant component.
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        const double lead = a(order[start], order[start]);
        while (end < order.size() &&
               std::abs(a(order[end], order[end]) - lead) <= 1e-10 * std::max(1.0, std::abs(lead)))
            ++end;
        if (end - start > 1) {
            std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end), [&](Eigen::Index x, Eigen::Index y) {
                                 return first_significant(v, x) < first_significant(v, y);
                             });
        }
        start = end;
    }

    SpectralDecomposition out;
    out.source_kind = kind;
    out.sweeps = sweep;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = a(src, src);
        out.eigenvectors.col(k) = v.col(src);
        normalize_sign(out.eigenvectors.col(k));
    }
    return out;
}

SpectralDecomposition eigendecompose(const CorrelationMatrix& matrix, const JacobiOptions& options)
{
    return eigendecompose(matrix.entries, matrix.kind, options);
}

MPReference mp_bounds(double q)
{
    if (!(q >= 1.0) || !std::isfinite(q))
        throw Error(ErrorCode::InvalidQ, "Q = T/N must be >= 1, got " + format_double(q));
    const double root = std::sqrt(1.0 / q);
    return MPReference{q, (1.0 - root) * (1.0 - root), (1.0 + root) * (1.0 + root)};
}

double mp_density(double lambda, double q)
{
    const auto ref = mp_bounds(q);
    if (!(lambda > ref.lambda_min) || !(lambda < ref.lambda_max) || lambda <= 0.0)
        return 0.0;
    return q / (2.0 * std::numbers::pi) * std::sqrt((ref.lambda_max - lambda) * (lambda - ref.lambda_min)) / lambda;
}

DeviationReport deviation_report(const SpectralDecomposition& decomp, const MPReference& ref,
                                 std::span<const std::size_t> ranks)
{
    const auto n = decomp.n();
    if (n == 0)
        throw Error(ErrorCode::EmptyMatrix, "empty decomposition");
    DeviationReport r;
    r.n = n;
    r.lambda_min = ref.lambda_min;
    r.lambda_max = ref.lambda_max;
    r.lambda_1 = decomp.eigenvalues(0);
    for (Eigen::Index k = 0; k < decomp.eigenvalues.size(); ++k) {
        const double l = decomp.eigenvalues(k);
        r.trace += l;
        if (l > ref.lambda_max)
            ++r.n_above;
        else if (l < ref.lambda_min)
            ++r.n_below;
    }
    r.pct_above = 100.0 * static_cast<double>(r.n_above) / static_cast<double>(n);
    r.pct_below = 100.0 * static_cast<double>(r.n_below) / static_cast<double>(n);
    r.absorption_ratio = r.lambda_1 / static_cast<double>(n);
    r.lambda1_variance_fraction = r.lambda_1 / r.trace;
    for (auto k : ranks) {
        if (k < 1 || k > n)
            throw Error(ErrorCode::InvalidConfig, "eigenvalue rank " + std::to_string(k) + " out of range");
        r.variance_fractions.emplace_back(k, decomp.eigenvalues(static_cast<Eigen::Index>(k - 1)) / r.trace);
    }
    return r;
}

ReturnPanel shuffled_panel(const ReturnPanel& panel, std::uint64_t seed, std::uint64_t realization)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(realization >> 32)};
    std::mt19937_64 rng(seq);

    Grid values = panel.values();
    std::vector<double> observed;
    for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
        observed.clear();
        for (std::size_t k = 0; k < panel.n_times(); ++k) {
            const double x = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            if (!is_missing(x))
                observed.push_back(x);
        }
        for (std::size_t m = observed.size(); m > 1; --m)
            std::swap(observed[m - 1], observed[bounded(rng, m)]);
        std::size_t next = 0;
        for (std::size_t k = 0; k < panel.n_times(); ++k) {
            auto& cell = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            if (!is_missing(cell))
                cell = observed[next++];
        }
    }
    return ReturnPanel(panel.tickers(), panel.timestamps(), std::move(values), panel.meta());
}

std::vector<SpectralDecomposition> shuffle_null(const ReturnPanel& panel, std::size_t realizations,
                                                std::uint64_t seed, const CorrelationOptions& options)
{
    if (realizations < 1)
        throw Error(ErrorCode::InvalidConfig, "shuffle_null needs at least one realization");
    std::vector<SpectralDecomposition> out;
    out.reserve(realizations);
    for (std::size_t r = 0; r < realizations; ++r) {
        const auto shuffled = shuffled_panel(panel, seed, r);
        auto corr = pairwise_correlation(shuffled, options);
        out.push_back(eigendecompose(corr.entries, MatrixKind::Null));
    }
    return out;
}

} // namespace rmtcorr
