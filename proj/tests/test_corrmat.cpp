#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "rmtcorr/corrmat.hpp"
#include "support.hpp"

using namespace rmtcorr;
using testing::nan;

namespace {

CorrelationOptions opts(std::size_t min_overlap, SampleMode sample = SampleMode::Pairwise,
                        OverlapPolicy policy = OverlapPolicy::Strict, unsigned jobs = 1)
{
    CorrelationOptions o;
    o.min_overlap = min_overlap;
    o.sample = sample;
    o.policy = policy;
    o.jobs = jobs;
    return o;
}

// Rows whose sample correlation matrix equals `target` exactly (to rounding):
// centre, orthonormalise the sample, then colour with the Cholesky factor.
std::vector<std::vector<double>> rows_with_correlation(const Eigen::MatrixXd& target, std::size_t t,
                                                       std::uint64_t seed)
{
    const auto n = target.rows();
    testing::Gauss g(seed);
    Eigen::MatrixXd z(n, static_cast<Eigen::Index>(t));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < z.cols(); ++k)
            z(i, k) = g();
    for (Eigen::Index i = 0; i < n; ++i)
        z.row(i).array() -= z.row(i).mean();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j)
            z.row(i) -= z.row(i).dot(z.row(j)) * z.row(j);
        z.row(i) /= z.row(i).norm();
    }
    const Eigen::MatrixXd l = target.llt().matrixL();
    const Eigen::MatrixXd x = l * z;
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        rows[static_cast<std::size_t>(i)] = std::vector<double>(x.row(i).begin(), x.row(i).end());
    return rows;
}

} // namespace

TEST_CASE("pairwise_correlation: self and anti correlation")
{
    testing::Gauss g(1);
    auto a = g.vector(300);
    std::vector<double> neg(a.size());
    std::transform(a.begin(), a.end(), neg.begin(), [](double v) { return -v; });
    const auto m = pairwise_correlation(testing::make_panel({a, a, neg}), opts(100));
    CHECK(m.entries(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.entries(0, 2) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(m.entries(0, 0) == 1.0);
    CHECK(m.overlap(0, 2) == 300);
    CHECK(m.kind == MatrixKind::Raw);
}

TEST_CASE("pairwise_correlation: independent series match the oracle")
{
    const auto rows = testing::gaussian_rows(4, 10000, 42);
    const auto m = pairwise_correlation(testing::make_panel(rows), opts(100));
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            const auto want = testing::pearson_oracle(rows[i], rows[j]);
            REQUIRE(want);
            CHECK(std::abs(m.entries(i, j)) < 0.05);
            CHECK(m.entries(i, j) == doctest::Approx(*want).epsilon(1e-12));
        }
    }
}

TEST_CASE("pairwise_correlation: pairwise-complete sample matches the oracle on sparse data")
{
    auto rows = testing::gaussian_rows(6, 800, 3);
    testing::Gauss g(99);
    for (auto& r : rows)
        for (auto& v : r)
            if (g.uniform() < 0.25)
                v = nan();
    const auto panel = testing::make_panel(rows);
    const auto m = pairwise_correlation(panel, opts(100));
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            if (i == j)
                continue;
            CHECK(m.entries(i, j) == doctest::Approx(*testing::pearson_oracle(rows[i], rows[j])).epsilon(1e-12));
            std::int64_t joint = 0;
            for (std::size_t k = 0; k < 800; ++k)
                joint += !std::isnan(rows[i][k]) && !std::isnan(rows[j][k]);
            CHECK(m.overlap(i, j) == joint);
            CHECK(m.entries(i, j) == m.entries(j, i));
        }
    }
}

TEST_CASE("pairwise_correlation: listwise uses the common sample")
{
    auto rows = testing::gaussian_rows(3, 500, 8);
    rows[0][10] = nan();
    rows[1][20] = nan();
    rows[2][30] = nan();
    const auto m = pairwise_correlation(testing::make_panel(rows), opts(100, SampleMode::Listwise));
    std::vector<std::vector<double>> common = rows;
    for (auto& r : common)
        r[10] = r[20] = r[30] = nan();
    CHECK(m.entries(0, 1) == doctest::Approx(*testing::pearson_oracle(common[0], common[1])).epsilon(1e-12));
    CHECK(m.overlap(0, 1) == 497);
    CHECK(m.overlap(1, 2) == 497);
}

TEST_CASE("pairwise_correlation: overlap policy")
{
    auto rows = testing::gaussian_rows(3, 200, 4);
    for (std::size_t k = 0; k < 150; ++k)
        rows[2][k] = nan();
    const auto panel = testing::make_panel(rows);
    CHECK_THROWS_CODE(pairwise_correlation(panel, opts(100)), ErrorCode::InsufficientOverlap);
    const auto lenient = pairwise_correlation(panel, opts(100, SampleMode::Pairwise, OverlapPolicy::Lenient));
    REQUIRE(lenient.undefined_pairs.size() == 2);
    CHECK(lenient.undefined_pairs[0] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(lenient.undefined_pairs[1] == std::pair<std::size_t, std::size_t>{1, 2});
    CHECK(lenient.entries(0, 2) == 0.0);
    CHECK(lenient.overlap(0, 2) == 50);
    CHECK_THROWS_CODE(pairwise_correlation(panel, opts(1)), ErrorCode::InvalidConfig);
}

TEST_CASE("pairwise_correlation: affine invariance, negation, permutation")
{
    const auto rows = testing::gaussian_rows(5, 400, 17);
    const auto base = pairwise_correlation(testing::make_panel(rows), opts(100));

    auto affine = rows;
    for (std::size_t i = 0; i < affine.size(); ++i)
        for (auto& v : affine[i])
            v = (0.5 + static_cast<double>(i)) * v + 0.01 * static_cast<double>(i);
    const auto a = pairwise_correlation(testing::make_panel(affine), opts(100));
    CHECK((a.entries - base.entries).cwiseAbs().maxCoeff() < 1e-12);

    auto negated = rows;
    for (auto& v : negated[1])
        v = -v;
    const auto n = pairwise_correlation(testing::make_panel(negated), opts(100));
    CHECK(n.entries(0, 1) == doctest::Approx(-base.entries(0, 1)).epsilon(1e-13));
    CHECK(n.entries(2, 3) == base.entries(2, 3));

    const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
    std::vector<std::vector<double>> permuted;
    for (auto p : perm)
        permuted.push_back(rows[p]);
    const auto pm = pairwise_correlation(testing::make_panel(permuted), opts(100));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(pm.entries(i, j) == base.entries(perm[i], perm[j]));
}

TEST_CASE("pairwise_correlation: output does not depend on the job count")
{
    auto rows = testing::gaussian_rows(17, 300, 23);
    const auto one = pairwise_correlation(testing::make_panel(rows), opts(50, SampleMode::Pairwise, OverlapPolicy::Strict, 1));
    const auto four = pairwise_correlation(testing::make_panel(rows), opts(50, SampleMode::Pairwise, OverlapPolicy::Strict, 4));
    CHECK(one.entries == four.entries);
    CHECK(one.overlap == four.overlap);
}

TEST_CASE("pairwise_correlation: entries bounded, diagonal exact")
{
    const auto rows = testing::gaussian_rows(20, 150, 31);
    const auto m = pairwise_correlation(testing::make_panel(rows), opts(100));
    CHECK(m.entries.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i)
        CHECK(m.entries(i, i) == 1.0);
    CHECK(m.entries == m.entries.transpose());
}

TEST_CASE("fit_factor: exact factor and constant series")
{
    testing::Gauss g(2);
    const auto rm = g.vector(200, 1e-3);
    std::vector<double> twice(rm.size()), flat(rm.size(), 0.003);
    std::transform(rm.begin(), rm.end(), twice.begin(), [](double v) { return 2.0 * v; });
    const auto fit = fit_factor(testing::make_panel({twice, flat}), testing::make_series(rm));
    CHECK(fit.beta[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(fit.alpha[0]) < 1e-15);
    CHECK(fit.residuals.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fit.beta[1] == 0.0);
    CHECK(fit.alpha[1] == 0.003);
    CHECK(fit.residuals.row(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_factor: noisy beta matches the OLS oracle; residual mean is zero")
{
    std::vector<double> factor;
    testing::Gauss g(77);
    const auto rm = g.vector(10000);
    std::vector<double> r(rm.size());
    for (std::size_t k = 0; k < r.size(); ++k)
        r[k] = 0.8 * rm[k] + 0.0005 + 0.7 * g();
    r[5] = nan();
    const auto fit = fit_factor(testing::make_panel({r, rm}), testing::make_series(rm));
    const auto want = testing::ols_oracle(r, rm);
    CHECK(fit.beta[0] == doctest::Approx(0.8).epsilon(0.05 / 0.8));
    CHECK(fit.beta[0] == doctest::Approx(want.beta).epsilon(1e-12));
    CHECK(fit.alpha[0] == doctest::Approx(want.alpha).epsilon(1e-9));
    double sum = 0.0;
    std::size_t n = 0;
    for (Eigen::Index k = 0; k < fit.residuals.cols(); ++k) {
        if (!is_missing(fit.residuals(0, k))) {
            sum += fit.residuals(0, k);
            ++n;
        }
    }
    CHECK(n == 9999);
    CHECK(std::abs(sum / static_cast<double>(n)) < 1e-10);
    CHECK(is_missing(fit.residuals(0, 5)));
}

TEST_CASE("fit_factor: residuals only where stock and index both exist")
{
    auto rows = testing::gaussian_rows(2, 50, 6);
    rows[0][3] = nan();
    auto index = testing::gaussian_rows(1, 50, 7)[0];
    index[4] = nan();
    const auto fit = fit_factor(testing::make_panel(rows), testing::make_series(index));
    CHECK(is_missing(fit.residuals(0, 3)));
    CHECK(is_missing(fit.residuals(0, 4)));
    CHECK_FALSE(is_missing(fit.residuals(0, 5)));
}

TEST_CASE("fit_factor: degenerate index")
{
    const auto rows = testing::gaussian_rows(2, 50, 1);
    CHECK_THROWS_CODE(fit_factor(testing::make_panel(rows), testing::make_series(std::vector<double>(50, 0.001))),
                      ErrorCode::DegenerateIndex);
    std::vector<double> one(50, nan());
    one[7] = 0.1;
    CHECK_THROWS_CODE(fit_factor(testing::make_panel(rows), testing::make_series(one)), ErrorCode::DegenerateIndex);
}

TEST_CASE("partial_correlation_direct: identical and independent residuals")
{
    testing::Gauss g(12);
    const auto rm = g.vector(10000);
    const auto e1 = g.vector(10000);
    const auto e2 = g.vector(10000);
    std::vector<double> a(10000), b(10000), c(10000);
    for (std::size_t k = 0; k < 10000; ++k) {
        a[k] = 0.9 * rm[k] + e1[k];
        b[k] = 1.3 * rm[k] + e1[k];
        c[k] = 0.4 * rm[k] + e2[k];
    }
    const auto fit = fit_factor(testing::make_panel({a, b, c}), testing::make_series(rm));
    const auto p = partial_correlation_direct(fit, opts(100));
    CHECK(p.kind == MatrixKind::Partial);
    CHECK(p.conditioning_label == "index");
    CHECK(std::abs(p.entries(0, 2)) < 0.05);
    std::vector<double> ra(fit.residuals.row(0).begin(), fit.residuals.row(0).end());
    std::vector<double> rc(fit.residuals.row(2).begin(), fit.residuals.row(2).end());
    CHECK(p.entries(0, 2) == doctest::Approx(*testing::pearson_oracle(ra, rc)).epsilon(1e-12));
    CHECK(p.entries(0, 1) > 0.999);
}

TEST_CASE("partial_correlation_direct: exact-factor residuals are flagged, not NaN")
{
    testing::Gauss g(3);
    const auto rm = g.vector(300);
    std::vector<double> exact(rm.size());
    std::transform(rm.begin(), rm.end(), exact.begin(), [](double v) { return 1.7 * v; });
    const auto noisy = g.vector(300);
    const auto fit = fit_factor(testing::make_panel({exact, noisy}), testing::make_series(rm));
    CHECK_THROWS_CODE(partial_correlation_direct(fit, opts(100)), ErrorCode::InsufficientOverlap);
    const auto p = partial_correlation_direct(fit, opts(100, SampleMode::Pairwise, OverlapPolicy::Lenient));
    CHECK(p.undefined_pairs.size() == 1);
    CHECK(p.entries(0, 1) == 0.0);
    CHECK_FALSE(p.entries.hasNaN());
}

TEST_CASE("partial_correlation_closed_form: limits and worked example")
{
    CorrelationMatrix raw;
    raw.tickers = {"i", "j"};
    raw.entries = Eigen::Matrix2d{{1.0, 0.314}, {0.314, 1.0}};
    raw.overlap = CountMatrix::Constant(2, 2, 100);

    const std::vector<double> zero{0.0, 0.0};
    CHECK(partial_correlation_closed_form(raw, zero).entries(0, 1) == doctest::Approx(0.314).epsilon(1e-15));

    const std::vector<double> explain{0.628, 0.5};
    CHECK(std::abs(partial_correlation_closed_form(raw, explain).entries(0, 1)) < 1e-15);

    const std::vector<double> example{0.6, 0.5};
    const auto p = partial_correlation_closed_form(raw, example, "m");
    const double hand = (0.314 - 0.6 * 0.5) / std::sqrt((1 - 0.36) * (1 - 0.25));
    CHECK(p.entries(0, 1) == doctest::Approx(hand).epsilon(1e-15));
    CHECK(p.entries(0, 1) == doctest::Approx(0.0202).epsilon(0.001 / 0.0202));
    CHECK(p.entries(0, 0) == 1.0);
    CHECK(p.kind == MatrixKind::Partial);
    CHECK(p.conditioning_label == "m");
}

TEST_CASE("partial_correlation_closed_form: agrees with the residual route on a constructed triple")
{
    const Eigen::Matrix3d target{{1.0, 0.314, 0.6}, {0.314, 1.0, 0.5}, {0.6, 0.5, 1.0}};
    const auto rows = rows_with_correlation(target, 5000, 2024);
    const auto panel = testing::make_panel({rows[0], rows[1]});
    const auto index = testing::make_series(rows[2]);

    const auto raw = pairwise_correlation(panel, opts(100));
    CHECK(raw.entries(0, 1) == doctest::Approx(0.314).epsilon(1e-12));
    const auto c_im = index_correlations(panel, index, opts(100));
    CHECK(c_im[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(c_im[1] == doctest::Approx(0.5).epsilon(1e-12));

    const auto closed = partial_correlation_closed_form(raw, c_im);
    const auto direct = partial_correlation_direct(fit_factor(panel, index), opts(100));
    const double hand = (0.314 - 0.3) / std::sqrt(0.64 * 0.75);
    CHECK(closed.entries(0, 1) == doctest::Approx(hand).epsilon(1e-10));
    CHECK(std::abs(direct.entries(0, 1) - closed.entries(0, 1)) < 1e-10);
}

TEST_CASE("partial_correlation_closed_form: route equivalence on complete random panels")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::vector<double> factor;
        auto rows = testing::factor_rows(12, 700, seed, factor);
        const auto panel = testing::make_panel(rows);
        const auto index = testing::make_series(factor);
        const auto closed =
            partial_correlation_closed_form(pairwise_correlation(panel, opts(100)), index_correlations(panel, index, opts(100)));
        const auto direct = partial_correlation_direct(fit_factor(panel, index), opts(100));
        CHECK((closed.entries - direct.entries).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("partial_correlation_closed_form: errors")
{
    CorrelationMatrix raw;
    raw.tickers = {"a", "b"};
    raw.entries = Eigen::Matrix2d::Identity();
    raw.overlap = CountMatrix::Zero(2, 2);
    const std::vector<double> colinear{1.0, 0.2};
    CHECK_THROWS_CODE(partial_correlation_closed_form(raw, colinear), ErrorCode::IndexColinearStock);
    const std::vector<double> near{0.2, -(1.0 - 1e-13)};
    CHECK_THROWS_CODE(partial_correlation_closed_form(raw, near), ErrorCode::IndexColinearStock);
    const std::vector<double> short_vec{0.1};
    CHECK_THROWS_CODE(partial_correlation_closed_form(raw, short_vec), ErrorCode::InvalidConfig);
    raw.kind = MatrixKind::Partial;
    const std::vector<double> ok{0.1, 0.2};
    CHECK_THROWS_CODE(partial_correlation_closed_form(raw, ok), ErrorCode::InvalidConfig);
}

TEST_CASE("index_correlations: oracle and errors")
{
    auto rows = testing::gaussian_rows(3, 400, 50);
    auto index = testing::gaussian_rows(1, 400, 51)[0];
    for (std::size_t k = 0; k < 400; ++k)
        rows[1][k] += index[k];
    rows[2][9] = nan();
    const auto c = index_correlations(testing::make_panel(rows), testing::make_series(index), opts(100));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(c[i] == doctest::Approx(*testing::pearson_oracle(rows[i], index)).epsilon(1e-12));
    CHECK_THROWS_CODE(index_correlations(testing::make_panel(rows), testing::make_series(index), opts(401)),
                      ErrorCode::InsufficientOverlap);
    CHECK_THROWS_CODE(index_correlations(testing::make_panel(rows), testing::make_series(std::vector<double>(400, 1.0)),
                                         opts(100)),
                      ErrorCode::DegenerateIndex);
}

TEST_CASE("coefficient_histogram: tiny and degenerate matrices")
{
    CorrelationMatrix m;
    m.entries = Eigen::Matrix2d{{1.0, 0.5}, {0.5, 1.0}};
    auto s = coefficient_histogram(m, 10);
    CHECK(s.count == 1);
    CHECK(s.mean == 0.5);
    CHECK(s.max == 0.5);
    CHECK(s.min == 0.5);

    m.entries = Eigen::MatrixXd::Constant(6, 6, 0.3);
    m.entries.diagonal().setOnes();
    s = coefficient_histogram(m, 4);
    CHECK(s.count == 15);
    CHECK(s.mean == doctest::Approx(0.3));
    CHECK(s.negative_fraction == 0.0);
    double mass = 0.0;
    for (std::size_t b = 0; b < 4; ++b)
        mass += s.histogram.densities[b] * (s.histogram.bin_edges[b + 1] - s.histogram.bin_edges[b]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    m.entries = Eigen::MatrixXd::Ones(1, 1);
    CHECK_THROWS_CODE(coefficient_histogram(m, 4), ErrorCode::EmptyMatrix);
    m.entries = Eigen::Matrix2d::Identity();
    CHECK_THROWS_CODE(coefficient_histogram(m, 0), ErrorCode::InvalidConfig);
}

TEST_CASE("coefficient_histogram: random symmetric matrix, 50 bins")
{
    testing::Gauss g(404);
    const int n = 40;
    CorrelationMatrix m;
    m.entries = Eigen::MatrixXd::Identity(n, n);
    std::vector<double> upper;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = std::tanh(0.4 * g());
            m.entries(i, j) = m.entries(j, i) = v;
            upper.push_back(v);
        }
    }
    const auto s = coefficient_histogram(m, 50);
    REQUIRE(s.histogram.bin_edges.size() == 51);
    long double mass = 0.0;
    for (std::size_t b = 0; b < 50; ++b) {
        CHECK(s.histogram.densities[b] >= 0.0);
        mass += s.histogram.densities[b] * (s.histogram.bin_edges[b + 1] - s.histogram.bin_edges[b]);
    }
    CHECK(std::abs(static_cast<double>(mass) - 1.0) <= 1e-12);
    const double mean = std::accumulate(upper.begin(), upper.end(), 0.0) / static_cast<double>(upper.size());
    CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.min == *std::min_element(upper.begin(), upper.end()));
    CHECK(s.max == *std::max_element(upper.begin(), upper.end()));
    const auto neg = std::count_if(upper.begin(), upper.end(), [](double v) { return v < 0; });
    CHECK(s.negative_fraction == doctest::Approx(static_cast<double>(neg) / static_cast<double>(upper.size())));
    CHECK(std::is_sorted(s.histogram.bin_edges.begin(), s.histogram.bin_edges.end()));
}

TEST_CASE("coefficient_histogram excludes undefined pairs")
{
    CorrelationMatrix m;
    m.entries = Eigen::Matrix3d{{1, 0.2, 0.0}, {0.2, 1, 0.4}, {0.0, 0.4, 1}};
    m.undefined_pairs = {{0, 2}};
    const auto s = coefficient_histogram(m, 3);
    CHECK(s.count == 2);
    CHECK(s.mean == doctest::Approx(0.3));
}
