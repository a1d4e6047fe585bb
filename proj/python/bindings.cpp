#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "rmtcorr/bundle.hpp"
#include "rmtcorr/cli.hpp"
#include "rmtcorr/corrmat.hpp"
#include "rmtcorr/eigenportfolio.hpp"
#include "rmtcorr/groupsep.hpp"
#include "rmtcorr/spectra.hpp"
#include "rmtcorr/synth.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace rmtcorr;

namespace {

std::vector<std::string> numbered_tickers(std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back("X" + std::to_string(i));
    return out;
}

// Rows are stocks, columns are consecutive minute slots of one synthetic day.
ReturnPanel panel_from_array(const Grid& values)
{
    const auto n = static_cast<std::size_t>(values.rows());
    const auto t = static_cast<std::size_t>(values.cols());
    std::vector<Timestamp> ts;
    for (std::size_t k = 0; k < t; ++k)
        ts.push_back({static_cast<std::int32_t>(k / 1440), static_cast<std::int32_t>(k % 1440)});
    auto tickers = numbered_tickers(n);
    std::vector<StockMeta> meta;
    for (const auto& name : tickers)
        meta.push_back({name, Exchange::OTHER, "", std::nullopt});
    return ReturnPanel(std::move(tickers), std::move(ts), values, std::move(meta));
}

CorrelationOptions make_options(std::size_t min_overlap, bool listwise, bool lenient, unsigned jobs)
{
    CorrelationOptions o;
    o.min_overlap = min_overlap;
    o.sample = listwise ? SampleMode::Listwise : SampleMode::Pairwise;
    o.policy = lenient ? OverlapPolicy::Lenient : OverlapPolicy::Strict;
    o.jobs = jobs;
    return o;
}

py::dict matrix_dict(const CorrelationMatrix& m)
{
    return py::dict("entries"_a = m.entries, "overlap"_a = Eigen::MatrixX<std::int64_t>(m.overlap),
                    "undefined_pairs"_a = m.undefined_pairs, "kind"_a = std::string(to_string(m.kind)));
}

py::dict decomposition_dict(const SpectralDecomposition& d)
{
    return py::dict("eigenvalues"_a = d.eigenvalues, "eigenvectors"_a = d.eigenvectors, "sweeps"_a = d.sweeps);
}

Series series_from(const std::vector<double>& values)
{
    Series s;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!is_missing(values[k]))
            s.push_back({static_cast<std::int32_t>(k / 1440), static_cast<std::int32_t>(k % 1440)}, values[k]);
    }
    return s;
}

std::vector<double> dense(const Series& s, std::size_t t)
{
    std::vector<Timestamp> grid;
    for (std::size_t k = 0; k < t; ++k)
        grid.push_back({static_cast<std::int32_t>(k / 1440), static_cast<std::int32_t>(k % 1440)});
    return align_to(s, grid);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Cross-correlation spectra of intraday returns against random-matrix references";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def(
        "mp_bounds",
        [](double q) {
            const auto r = mp_bounds(q);
            return py::make_tuple(r.lambda_min, r.lambda_max);
        },
        "q"_a);
    m.def("mp_density", py::vectorize(&mp_density), "lam"_a, "q"_a);

    m.def(
        "correlation",
        [](const Grid& returns, std::size_t min_overlap, bool listwise, bool lenient, unsigned jobs) {
            const auto panel = panel_from_array(returns);
            return matrix_dict(pairwise_correlation(panel, make_options(min_overlap, listwise, lenient, jobs)));
        },
        "returns"_a, "min_overlap"_a = 100, "listwise"_a = false, "lenient"_a = false, "jobs"_a = 1,
        "Pearson matrix of the rows of an N x T array; NaN marks a missing return.");

    m.def(
        "partial_correlation",
        [](const Grid& returns, const std::vector<double>& index, std::size_t min_overlap, bool listwise) {
            const auto panel = panel_from_array(returns);
            const auto fit = fit_factor(panel, series_from(index));
            return matrix_dict(partial_correlation_direct(fit, make_options(min_overlap, listwise, false, 1)));
        },
        "returns"_a, "index"_a, "min_overlap"_a = 100, "listwise"_a = false,
        "Correlation of the residuals after regressing each row on the index.");

    m.def(
        "partial_correlation_closed_form",
        [](const Eigen::MatrixXd& raw, const std::vector<double>& index_corr) {
            CorrelationMatrix c;
            c.entries = raw;
            c.tickers = numbered_tickers(static_cast<std::size_t>(raw.rows()));
            c.overlap = CountMatrix::Zero(raw.rows(), raw.cols());
            return partial_correlation_closed_form(c, index_corr).entries;
        },
        "raw"_a, "index_corr"_a);

    m.def(
        "eigendecompose",
        [](const Eigen::MatrixXd& matrix, double tolerance, int max_sweeps) {
            return decomposition_dict(eigendecompose(matrix, MatrixKind::Raw, JacobiOptions{tolerance, max_sweeps}));
        },
        "matrix"_a, "tolerance"_a = 1e-12, "max_sweeps"_a = 100);

    m.def(
        "deviation_report",
        [](const Eigen::VectorXd& eigenvalues, double q) {
            SpectralDecomposition d;
            d.eigenvalues = eigenvalues;
            const auto r = deviation_report(d, mp_bounds(q));
            return py::dict("n"_a = r.n, "lambda_min"_a = r.lambda_min, "lambda_max"_a = r.lambda_max,
                            "lambda_1"_a = r.lambda_1, "n_below"_a = r.n_below, "n_above"_a = r.n_above,
                            "pct_below"_a = r.pct_below, "pct_above"_a = r.pct_above,
                            "absorption_ratio"_a = r.absorption_ratio, "trace"_a = r.trace);
        },
        "eigenvalues"_a, "q"_a, "Eigenvalues must be sorted in descending order.");

    m.def(
        "eigenportfolio_returns",
        [](const Grid& returns, const std::vector<double>& u) {
            const auto panel = panel_from_array(returns);
            const auto p = eigenportfolio_returns(panel, u);
            return py::make_tuple(dense(p.returns, panel.n_times()), p.normalizer);
        },
        "returns"_a, "u"_a, "Normalized eigenportfolio return per column (missing returns count as zero).");

    m.def(
        "market_regression",
        [](const std::vector<double>& response, const std::vector<double>& index) {
            const auto r = market_regression(series_from(response), series_from(index));
            return py::dict("slope"_a = r.slope, "intercept"_a = r.intercept, "stderr"_a = r.slope_stderr,
                            "r2"_a = r.r_squared, "n"_a = r.n_points);
        },
        "response"_a, "index"_a);

    m.def(
        "sign_separation",
        [](const std::vector<double>& u, const std::vector<std::string>& labels) {
            const auto t = sign_separation(u, labels);
            py::dict groups;
            for (std::size_t g = 0; g < t.groups.size(); ++g)
                groups[py::str(t.groups[g])] = py::make_tuple(t.pos_count[g], t.neg_count[g]);
            return groups;
        },
        "u"_a, "labels"_a, "Map of group -> (positive count, negative count).");
    m.def(
        "separation_score",
        [](const std::vector<double>& u, const std::vector<std::string>& labels) {
            return separation_score(sign_separation(u, labels));
        },
        "u"_a, "labels"_a);

    m.def(
        "generate_factor_market",
        [](std::size_t n_stocks, std::size_t n_days, std::size_t minutes_per_day, double market_vol,
           double group_strength, double idio_vol, double missing_rate, std::uint64_t seed) {
            SynthConfig c;
            c.n_stocks = n_stocks;
            c.n_days = n_days;
            c.minutes_per_day = minutes_per_day;
            c.market_vol = market_vol;
            c.group_factor_strength = group_strength;
            c.idio_vol = idio_vol;
            c.missing_rate = missing_rate;
            c.seed = seed;
            const auto mk = generate_factor_market(c);
            std::vector<std::string> exchanges;
            for (const auto& meta : mk.meta)
                exchanges.emplace_back(to_string(meta.exchange));
            return py::dict("returns"_a = mk.panel.values(), "tickers"_a = mk.panel.tickers(),
                            "exchanges"_a = exchanges, "betas"_a = mk.truth.betas,
                            "capitalizations"_a = mk.truth.capitalizations,
                            "factor"_a = align_to(mk.truth.factor, mk.panel.timestamps()));
        },
        "n_stocks"_a = 200, "n_days"_a = 25, "minutes_per_day"_a = 240, "market_vol"_a = 1e-3,
        "group_strength"_a = 0.0, "idio_vol"_a = 1e-3, "missing_rate"_a = 0.0, "seed"_a = 1);

    m.def("sha256_hex", [](const py::bytes& b) { return sha256_hex(std::string(b)); }, "data"_a);
    m.def(
        "verify_manifest",
        [](const std::filesystem::path& dir) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& i : verify_manifest(dir))
                out.emplace_back(i.path, i.problem);
            return out;
        },
        "bundle_dir"_a, "List of (path, problem); empty when every hash matches.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        "args"_a, "Runs the command-line tool in-process; returns (exit code, stdout, stderr).");
}
