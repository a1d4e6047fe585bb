#include "rmtcorr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmtcorr/bundle.hpp"
#include "rmtcorr/eigenportfolio.hpp"
#include "rmtcorr/groupsep.hpp"
#include "rmtcorr/io.hpp"
#include "rmtcorr/spectra.hpp"

namespace rmtcorr::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

CorrelationOptions RunConfig::correlation_options() const
{
    CorrelationOptions o;
    o.min_overlap = min_overlap;
    o.sample = listwise ? SampleMode::Listwise : SampleMode::Pairwise;
    o.policy = lenient ? OverlapPolicy::Lenient : OverlapPolicy::Strict;
    o.jobs = jobs;
    return o;
}

namespace {

template <typename Fn>
std::string render(Fn&& fn)
{
    std::ostringstream s;
    fn(s);
    return s.str();
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

void require(bool ok, const std::string& msg)
{
    if (!ok)
        throw Error(ErrorCode::InvalidConfig, msg);
}

void validate_common(const RunConfig& cfg)
{
    require(!cfg.out.empty(), "--out is required");
    require(cfg.min_overlap >= 2, "--min-overlap must be >= 2");
    require(cfg.jobs >= 1, "--jobs must be >= 1");
    require(cfg.index_weighting == "equal" || cfg.index_weighting == "cap",
            "--index-weighting must be 'equal' or 'cap'");
    require(cfg.group_by == "exchange" || cfg.group_by == "sector", "--group-by must be 'exchange' or 'sector'");
    require(cfg.index_ticker.empty() || cfg.index_file.empty(), "give at most one of --index-ticker/--index-file");
}

std::vector<SectorBlock> parse_sector_blocks(const std::vector<std::string>& specs)
{
    std::vector<SectorBlock> out;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        require(colon != std::string::npos, "sector block must look like SIZE:STRENGTH, got '" + s + "'");
        try {
            out.push_back(SectorBlock{static_cast<std::size_t>(std::stoul(s.substr(0, colon))),
                                      std::stod(s.substr(colon + 1))});
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidConfig, "bad sector block '" + s + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Panel + index preparation shared by the analysis subcommands
// ---------------------------------------------------------------------------

struct Prepared {
    ReturnPanel panel;
    Series index;
    std::string index_label;
};

Prepared prepare(const RunConfig& cfg)
{
    require(!cfg.panel.empty(), "--panel is required");
    Prepared p;
    p.panel = io::read_panel(cfg.panel);

    if (!cfg.index_ticker.empty()) {
        auto row = p.panel.find(cfg.index_ticker);
        require(row.has_value(), "index ticker " + cfg.index_ticker + " is not in the panel");
        p.index = p.panel.row_series(*row);
        p.index_label = cfg.index_ticker;
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < p.panel.n_stocks(); ++i) {
            if (i != *row)
                keep.push_back(i);
        }
        require(!keep.empty(), "panel holds only the index ticker");
        p.panel = p.panel.select_rows(keep);
    } else if (!cfg.index_file.empty()) {
        p.index = io::read_index_bar_file(cfg.index_file);
        p.index_label = cfg.index_file.stem().string();
    } else {
        const bool cap = cfg.index_weighting == "cap";
        p.index = aggregate_index(p.panel, cap ? IndexWeighting::Capitalization : IndexWeighting::Equal);
        p.index_label = cap ? "aggregate-cap" : "aggregate-equal";
    }

    if (cfg.listwise) {
        // Every estimate (raw, partial, c_im) then shares one common sample.
        const auto index = align_to(p.index, p.panel.timestamps());
        std::vector<std::size_t> cols;
        for (std::size_t k = 0; k < p.panel.n_times(); ++k) {
            bool all = !is_missing(index[k]);
            for (std::size_t i = 0; i < p.panel.n_stocks() && all; ++i)
                all = !is_missing(p.panel.at(i, k));
            if (all)
                cols.push_back(k);
        }
        if (cols.size() < cfg.min_overlap)
            throw Error(ErrorCode::InsufficientOverlap, "listwise sample has " + std::to_string(cols.size()) +
                                                            " timestamps < min_overlap " +
                                                            std::to_string(cfg.min_overlap));
        Series idx;
        for (auto k : cols)
            idx.push_back(p.panel.timestamps()[k], index[k]);
        p.panel = p.panel.select_timestamps(cols);
        p.index = std::move(idx);
    }
    return p;
}

std::vector<std::size_t> top_ranks(const RunConfig& cfg, std::size_t n)
{
    std::vector<std::size_t> ranks;
    if (!cfg.ranks.empty()) {
        for (auto k : cfg.ranks) {
            require(k >= 1 && k <= n, "rank " + std::to_string(k) + " outside 1.." + std::to_string(n));
            ranks.push_back(k);
        }
        return ranks;
    }
    for (std::size_t k = 1; k <= std::min(cfg.top_k, n); ++k)
        ranks.push_back(k);
    return ranks;
}

struct MatrixResult {
    CorrelationMatrix matrix;
    SpectralDecomposition decomp;
};

MatrixResult analyze_raw(const Prepared& p, const RunConfig& cfg)
{
    MatrixResult r;
    r.matrix = pairwise_correlation(p.panel, cfg.correlation_options());
    r.decomp = eigendecompose(r.matrix);
    return r;
}

MatrixResult analyze_partial(const Prepared& p, const RunConfig& cfg)
{
    MatrixResult r;
    const auto fit = fit_factor(p.panel, p.index, p.index_label);
    r.matrix = partial_correlation_direct(fit, cfg.correlation_options());
    r.decomp = eigendecompose(r.matrix);
    return r;
}

MPReference mp_reference_for(const Prepared& p)
{
    return mp_bounds(static_cast<double>(p.panel.n_times()) / static_cast<double>(p.panel.n_stocks()));
}

ojson mp_json(const Prepared& p, const MPReference& ref)
{
    auto j = io::to_json(ref);
    j["n"] = p.panel.n_stocks();
    j["t"] = p.panel.n_times();
    return j;
}

std::vector<std::string> group_labels(const ReturnPanel& panel, const std::string& group_by,
                                      std::vector<std::string>& order)
{
    std::vector<std::string> labels;
    for (const auto& m : panel.meta())
        labels.push_back(group_by == "sector" ? m.sector : std::string(to_string(m.exchange)));
    order.clear();
    if (group_by == "exchange") {
        for (auto e : {Exchange::SZSE, Exchange::SHSE, Exchange::OTHER}) {
            std::string name(to_string(e));
            if (std::find(labels.begin(), labels.end(), name) != labels.end())
                order.push_back(name);
        }
    }
    return labels;
}

void write_portfolios(BundleWriter& bundle, const std::string& tag, const Prepared& p, const MatrixResult& r,
                      std::span<const std::size_t> ranks)
{
    auto regressions = ojson::array();
    for (auto k : ranks) {
        try {
            const auto port = eigenportfolio_returns(p.panel, r.decomp.vector(k - 1), k);
            bundle.add("eigenportfolio_" + tag + "_k" + std::to_string(k) + ".csv",
                       render([&](std::ostream& s) { io::write_eigenportfolio_csv(s, port, p.index); }));
            auto j = io::to_json(market_regression(port.returns, p.index), k);
            j["normalizer"] = port.normalizer;
            regressions.push_back(j);
        } catch (const Error& e) {
            if (e.error_class() != ErrorClass::Numeric)
                throw;
            regressions.push_back({{"k", k}, {"error", e.what()}});
        }
    }
    bundle.add("regression_" + tag + ".json", dump(regressions));
}

void write_groups(BundleWriter& bundle, const std::string& tag, const Prepared& p, const MatrixResult& r,
                  std::span<const std::size_t> ranks, const RunConfig& cfg)
{
    std::vector<std::string> order;
    const auto labels = group_labels(p.panel, cfg.group_by, order);
    std::vector<SignTable> tables;
    auto scores = ojson::array();
    for (auto k : ranks) {
        tables.push_back(sign_separation(r.decomp.vector(k - 1), labels, k, order));
        ojson entry{{"k", k}, {"zero_count", tables.back().zero_count}};
        try {
            entry["separation_score"] = separation_score(tables.back());
        } catch (const Error& e) {
            entry["separation_score"] = nullptr;
            entry["note"] = e.what();
        }
        scores.push_back(entry);
    }
    bundle.add("signs_" + tag + ".csv", render([&](std::ostream& s) { io::write_sign_tables_csv(s, tables); }));
    bundle.add("separation_" + tag + ".json", dump({{"group_by", cfg.group_by}, {"tables", scores}}));

    std::vector<std::optional<double>> caps;
    for (const auto& m : p.panel.meta())
        caps.push_back(m.capitalization);
    auto cap_json = ojson::array();
    for (auto k : ranks) {
        for (auto subset : {SignSubset::All, SignSubset::Positive, SignSubset::Negative}) {
            try {
                cap_json.push_back(io::to_json(cap_component_correlation(r.decomp.vector(k - 1), caps, subset, k)));
            } catch (const Error& e) {
                cap_json.push_back({{"k", k}, {"subset", std::string(to_string(subset))}, {"error", e.what()}});
            }
        }
    }
    bundle.add("cap_" + tag + ".json", dump(cap_json));
}

void write_spectrum(BundleWriter& bundle, const std::string& tag, const Prepared& p, const MatrixResult& r,
                    const MPReference& ref, std::span<const std::size_t> ranks, const RunConfig& cfg)
{
    bundle.add("spectrum_" + tag + ".csv", render([&](std::ostream& s) { io::write_spectrum_csv(s, r.decomp); }));
    bundle.add("eigenvectors_" + tag + ".csv",
               render([&](std::ostream& s) { io::write_eigenvectors_csv(s, r.decomp, p.panel.tickers(), ranks); }));
    auto dev = io::to_json(deviation_report(r.decomp, ref, ranks));
    dev["matrix"] = tag;
    dev["undefined_pairs"] = r.matrix.undefined_pairs.size();
    bundle.add("deviation_" + tag + ".json", dump(dev));
    bundle.add("corr_" + tag + ".rmx", render([&](std::ostream& s) { io::write_matrix_binary(s, r.matrix.entries); }));
    if (cfg.matrix_csv)
        bundle.add("corr_" + tag + ".csv", render([&](std::ostream& s) { io::write_matrix_csv(s, r.matrix); }));
}

ojson trace_json(const MatrixResult& r)
{
    const double trace = r.decomp.eigenvalues.sum();
    const double n = static_cast<double>(r.decomp.n());
    return {{"sum_lambda", trace}, {"n", r.decomp.n()}, {"abs_error", std::abs(trace - n)},
            {"within_1e-8", std::abs(trace - n) <= 1e-8}};
}

ojson config_json(const RunConfig& cfg)
{
    // No output directory here.
    return {{"panel", cfg.panel.string()},
            {"index_ticker", cfg.index_ticker},
            {"index_file", cfg.index_file.string()},
            {"index_weighting", cfg.index_weighting},
            {"sample", cfg.listwise ? "listwise" : "pairwise"},
            {"overlap_policy", cfg.lenient ? "lenient" : "strict"},
            {"min_overlap", cfg.min_overlap},
            {"bins", cfg.bins},
            {"top_k", cfg.top_k},
            {"shuffle_null", cfg.shuffle_null},
            {"seed", cfg.seed},
            {"group_by", cfg.group_by}};
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_synth(RunConfig cfg, std::ostream& out)
{
    require(!cfg.out.empty(), "--out is required");
    cfg.synth.sector_blocks = parse_sector_blocks(cfg.sector_blocks);
    cfg.synth.seed = cfg.seed;
    const auto market = generate_factor_market(cfg.synth);
    fs::create_directories(cfg.out);
    io::write_file(cfg.out / "bars.csv", render([&](std::ostream& s) { io::write_bar_csv(s, market.bars); }));
    io::write_file(cfg.out / "meta.csv", render([&](std::ostream& s) { io::write_meta_csv(s, market.meta); }));
    io::write_file(cfg.out / "truth.json", dump(io::to_json(market.truth)));
    out << "synth: " << market.panel.n_stocks() << " stocks, " << market.panel.n_times() << " timestamps -> "
        << cfg.out.string() << "\n";
    return kExitOk;
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out)
{
    require(!cfg.out.empty(), "--out is required");
    require(!cfg.bars.empty(), "--bars is required");
    require(!cfg.meta.empty(), "--meta is required");
    if (!fs::exists(cfg.meta))
        throw Error(ErrorCode::MetaMissing, "metadata file not found: " + cfg.meta.string());

    const auto bars = io::read_bar_file(cfg.bars);
    const auto meta = io::read_meta_file(cfg.meta);
    std::vector<TickerReturns> returns;
    returns.reserve(bars.size());
    for (const auto& s : bars)
        returns.push_back(TickerReturns{s.ticker, compute_intraday_returns(s)});
    const auto panel = build_panel(returns, meta);
    const auto kept = filter_universe(panel, cfg.min_days, cfg.min_obs);
    io::write_panel(cfg.out, kept);

    auto removed = ojson::array();
    for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
        if (kept.find(panel.tickers()[i]))
            continue;
        removed.push_back({{"ticker", panel.tickers()[i]},
                           {"active_days", panel.active_days(i)},
                           {"observations", panel.observed_count(i)},
                           {"zero_variance", panel.zero_variance(i)}});
    }
    io::write_file(cfg.out / "ingest_summary.json",
                   dump({{"input_tickers", panel.n_stocks()},
                         {"kept", kept.n_stocks()},
                         {"timestamps", kept.n_times()},
                         {"min_days", cfg.min_days},
                         {"min_obs", cfg.min_obs},
                         {"removed", removed}}));
    out << "ingest: kept " << kept.n_stocks() << " of " << panel.n_stocks() << " stocks, " << kept.n_times()
        << " timestamps -> " << cfg.out.string() << "\n";
    return kExitOk;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out)
{
    validate_common(cfg);
    require(cfg.bins >= 1, "--bins must be >= 1");
    const auto p = prepare(cfg);
    const auto ref = mp_reference_for(p);
    const auto ranks = top_ranks(cfg, p.panel.n_stocks());
    const auto opts = cfg.correlation_options();

    BundleWriter bundle(cfg.out);
    bundle.add("run_config.json", dump(config_json(cfg)));
    bundle.add("meta.csv", render([&](std::ostream& s) { io::write_meta_csv(s, p.panel.meta()); }));
    bundle.add("index.csv", render([&](std::ostream& s) { io::write_series_csv(s, p.index, "R_m"); }));
    bundle.add("mp_reference.json", dump(mp_json(p, ref)));

    const auto raw = analyze_raw(p, cfg);
    const auto partial = analyze_partial(p, cfg);

    const auto raw_stats = coefficient_histogram(raw.matrix, cfg.bins);
    const auto partial_stats = coefficient_histogram(partial.matrix, cfg.bins);
    bundle.add("coeff_raw.csv", render([&](std::ostream& s) { io::write_histogram_csv(s, raw_stats.histogram); }));
    bundle.add("coeff_partial.csv",
               render([&](std::ostream& s) { io::write_histogram_csv(s, partial_stats.histogram); }));

    ojson coeff{{"raw", io::to_json(raw_stats)}, {"partial", io::to_json(partial_stats)}};
    // Second route to the partial matrix; agrees with the residual route
    // exactly only when every pair shares one sample.
    try {
        const auto c_im = index_correlations(p.panel, p.index, opts);
        const auto closed = partial_correlation_closed_form(raw.matrix, c_im, p.index_label);
        coeff["partial_routes_max_abs_diff"] = (closed.entries - partial.matrix.entries).cwiseAbs().maxCoeff();
    } catch (const Error& e) {
        coeff["partial_routes_max_abs_diff"] = nullptr;
        coeff["partial_routes_note"] = e.what();
    }
    bundle.add("coeff_stats.json", dump(coeff));

    write_spectrum(bundle, "raw", p, raw, ref, ranks, cfg);
    write_spectrum(bundle, "partial", p, partial, ref, ranks, cfg);
    bundle.add("table1.csv", render([&](std::ostream& s) {
                   s << "matrix,lambda_min,lambda_max,lambda_1,pct_below,pct_above,absorption_ratio\n";
                   for (auto* r : {&raw, &partial}) {
                       const auto d = deviation_report(r->decomp, ref);
                       s << (r == &raw ? "raw" : "partial") << ',' << format_double(d.lambda_min) << ','
                         << format_double(d.lambda_max) << ',' << format_double(d.lambda_1) << ','
                         << format_double(d.pct_below) << ',' << format_double(d.pct_above) << ','
                         << format_double(d.absorption_ratio) << '\n';
                   }
               }));
    bundle.add("trace_check.json", dump({{"sample", cfg.listwise ? "listwise" : "pairwise"},
                                         {"raw", trace_json(raw)},
                                         {"partial", trace_json(partial)}}));

    write_portfolios(bundle, "raw", p, raw, ranks);
    write_portfolios(bundle, "partial", p, partial, ranks);
    write_groups(bundle, "raw", p, raw, ranks, cfg);
    write_groups(bundle, "partial", p, partial, ranks, cfg);

    if (cfg.shuffle_null > 0) {
        const auto nulls = shuffle_null(p.panel, cfg.shuffle_null, cfg.seed, opts);
        auto lambda1 = ojson::array();
        double mean = 0.0;
        bundle.add("null_spectra.csv", render([&](std::ostream& s) {
                       s << "realization,k,lambda\n";
                       for (std::size_t r = 0; r < nulls.size(); ++r) {
                           for (Eigen::Index k = 0; k < nulls[r].eigenvalues.size(); ++k)
                               s << r << ',' << (k + 1) << ',' << format_double(nulls[r].eigenvalues(k)) << '\n';
                       }
                   }));
        for (const auto& d : nulls) {
            lambda1.push_back(d.eigenvalues(0));
            mean += d.eigenvalues(0) / static_cast<double>(nulls.size());
        }
        bundle.add("null_summary.json",
                   dump({{"realizations", nulls.size()}, {"seed", cfg.seed}, {"lambda_1", lambda1},
                         {"mean_lambda_1", mean}, {"lambda_max", ref.lambda_max}}));
    }
    bundle.finish();

    out << "analyze: N=" << p.panel.n_stocks() << " T=" << p.panel.n_times() << " Q=" << format_double(ref.q)
        << " lambda_1(raw)=" << format_double(raw.decomp.eigenvalues(0))
        << " lambda_1(partial)=" << format_double(partial.decomp.eigenvalues(0)) << " -> " << cfg.out.string()
        << "\n";
    return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out)
{
    validate_common(cfg);
    const auto p = prepare(cfg);
    const auto ref = mp_reference_for(p);
    const auto ranks = top_ranks(cfg, p.panel.n_stocks());
    const auto r = cfg.partial ? analyze_partial(p, cfg) : analyze_raw(p, cfg);
    const std::string tag = cfg.partial ? "partial" : "raw";

    BundleWriter bundle(cfg.out);
    bundle.add("mp_reference.json", dump(mp_json(p, ref)));
    write_spectrum(bundle, tag, p, r, ref, ranks, cfg);
    bundle.finish();
    const auto d = deviation_report(r.decomp, ref);
    out << "spectrum(" << tag << "): lambda_1=" << format_double(d.lambda_1) << " above=" << d.n_above
        << " below=" << d.n_below << "\n";
    return kExitOk;
}

int cmd_portfolio(const RunConfig& cfg, std::ostream& out)
{
    validate_common(cfg);
    const auto p = prepare(cfg);
    const auto ranks = top_ranks(cfg, p.panel.n_stocks());
    const auto r = cfg.partial ? analyze_partial(p, cfg) : analyze_raw(p, cfg);
    const std::string tag = cfg.partial ? "partial" : "raw";

    BundleWriter bundle(cfg.out);
    bundle.add("index.csv", render([&](std::ostream& s) { io::write_series_csv(s, p.index, "R_m"); }));
    write_portfolios(bundle, tag, p, r, ranks);
    bundle.finish();
    out << "portfolio(" << tag << "): " << ranks.size() << " eigenportfolios -> " << cfg.out.string() << "\n";
    return kExitOk;
}

int cmd_groupsep(const RunConfig& cfg, std::ostream& out)
{
    validate_common(cfg);
    const auto p = prepare(cfg);
    const auto ranks = top_ranks(cfg, p.panel.n_stocks());
    const auto r = cfg.partial ? analyze_partial(p, cfg) : analyze_raw(p, cfg);
    const std::string tag = cfg.partial ? "partial" : "raw";

    BundleWriter bundle(cfg.out);
    write_groups(bundle, tag, p, r, ranks, cfg);
    bundle.finish();
    out << "groupsep(" << tag << "): " << ranks.size() << " eigenvectors -> " << cfg.out.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Option wiring
// ---------------------------------------------------------------------------

void add_config(CLI::App* sub)
{
    sub->add_option("--config", "key = value configuration file (flags override it)");
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splices `key = value` lines from the --config file into the argument list.
// Keys already given on the command line are skipped so flags take priority.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
    std::filesystem::path file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            file = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            file = args[i].substr(9);
    }
    if (file.empty())
        return args;
    if (!fs::exists(file))
        throw Error(ErrorCode::InvalidConfig, "config file not found: " + file.string());

    auto given = [&](const std::string& flag) {
        for (const auto& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0)
                return true;
        }
        return false;
    };
    std::vector<std::string> extra;
    std::istringstream in(io::read_file(file));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidConfig,
                        file.string() + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        const std::string flag = "--" + key;
        if (key == "config" || given(flag))
            continue;
        if (value == "true") {
            extra.push_back(flag);
        } else if (value != "false") {
            extra.push_back(flag);
            extra.push_back(value);
        }
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

void add_analysis_options(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--panel", cfg.panel, "Panel directory written by 'ingest'");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--index-ticker", cfg.index_ticker, "Use this panel ticker as the market index");
    sub->add_option("--index-file", cfg.index_file, "Minute-bar CSV of the market index");
    sub->add_option("--index-weighting", cfg.index_weighting, "Aggregate index weighting: equal|cap");
    sub->add_flag("--listwise", cfg.listwise, "Estimate on timestamps every stock observes");
    sub->add_flag("--lenient", cfg.lenient, "Report under-observed pairs instead of failing");
    sub->add_option("--min-overlap", cfg.min_overlap, "Minimum joint observations per pair");
    sub->add_option("--top-k", cfg.top_k, "Number of leading eigenvectors to report");
    sub->add_option("--jobs", cfg.jobs, "Worker threads for pair computation");
    sub->add_option("--group-by", cfg.group_by, "Group labels for sign tables: exchange|sector");
    add_config(sub);
}

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Random-matrix analysis of high-frequency return cross-correlations", "rmtcorr"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* synth = app.add_subcommand("synth", "Generate a planted factor market (bars, meta, truth)");
    synth->add_option("--out", cfg.out, "Output directory");
    synth->add_option("--n-stocks", cfg.synth.n_stocks);
    synth->add_option("--n-days", cfg.synth.n_days);
    synth->add_option("--minutes-per-day", cfg.synth.minutes_per_day);
    synth->add_option("--market-vol", cfg.synth.market_vol);
    synth->add_option("--beta-lo", cfg.synth.beta_lo);
    synth->add_option("--beta-hi", cfg.synth.beta_hi);
    synth->add_option("--group-strength", cfg.synth.group_factor_strength);
    synth->add_option("--group-fraction", cfg.synth.group_fraction);
    synth->add_option("--sector-block", cfg.sector_blocks, "SIZE:STRENGTH, repeatable");
    synth->add_option("--idio-vol", cfg.synth.idio_vol);
    synth->add_option("--missing-rate", cfg.synth.missing_rate);
    synth->add_option("--seed", cfg.seed);
    add_config(synth);

    auto* ingest = app.add_subcommand("ingest", "Build a filtered return panel from minute bars");
    ingest->add_option("--bars", cfg.bars, "Minute-bar CSV");
    ingest->add_option("--meta", cfg.meta, "Metadata CSV");
    ingest->add_option("--out", cfg.out, "Panel output directory");
    ingest->add_option("--min-days", cfg.min_days, "Minimum active trading days per stock");
    ingest->add_option("--min-obs", cfg.min_obs, "Minimum observed returns per stock");
    add_config(ingest);

    auto* analyze = app.add_subcommand("analyze", "Full raw/partial analysis bundle");
    add_analysis_options(analyze, cfg);
    analyze->add_option("--bins", cfg.bins, "Histogram bins for coefficient distributions");
    analyze->add_option("--shuffle-null", cfg.shuffle_null, "Shuffled-panel null realizations");
    analyze->add_option("--seed", cfg.seed, "Seed for the shuffle null");
    analyze->add_flag("--matrix-csv", cfg.matrix_csv, "Also write matrices as dense CSV");

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues, eigenvectors and MP deviations of one matrix");
    add_analysis_options(spectrum, cfg);
    spectrum->add_flag("--partial", cfg.partial, "Use the index-partialed matrix");
    spectrum->add_flag("--matrix-csv", cfg.matrix_csv, "Also write the matrix as dense CSV");

    auto* portfolio = app.add_subcommand("portfolio", "Eigenportfolio returns and market regressions");
    add_analysis_options(portfolio, cfg);
    portfolio->add_flag("--partial", cfg.partial, "Use the index-partialed matrix");
    portfolio->add_option("--k", cfg.ranks, "Eigenvector ranks, e.g. 1,2")->delimiter(',');

    auto* groupsep = app.add_subcommand("groupsep", "Sign tables and capitalization correlations");
    add_analysis_options(groupsep, cfg);
    groupsep->add_flag("--partial", cfg.partial, "Use the index-partialed matrix");
    groupsep->add_option("--k", cfg.ranks, "Eigenvector ranks, e.g. 2,3")->delimiter(',');

    try {
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*synth)
        return cmd_synth(cfg, out);
    if (*ingest)
        return cmd_ingest(cfg, out);
    if (*analyze)
        return cmd_analyze(cfg, out);
    if (*spectrum)
        return cmd_spectrum(cfg, out);
    if (*portfolio)
        return cmd_portfolio(cfg, out);
    return cmd_groupsep(cfg, out);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    return run(std::vector<std::string>(argv + std::min(argc, 1), argv + argc), out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(args, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.error_class()) {
        case ErrorClass::Input: return kExitInput;
        case ErrorClass::Numeric: return kExitNumeric;
        case ErrorClass::Config: return kExitConfig;
        }
        return kExitNumeric;
    } catch (const fs::filesystem_error& e) {
        err << "error: IoError: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

} // namespace rmtcorr::cli
