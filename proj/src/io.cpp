#include "rmtcorr/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "csv.hpp"

namespace rmtcorr::io {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const fs::path& path, ErrorCode missing_code = ErrorCode::IoError)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(missing_code, "cannot open " + path.string());
    return in;
}

nlohmann::ordered_json number_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

} // namespace

void write_bar_csv(std::ostream& out, const std::vector<BarSeries>& bars)
{
    out << "ticker,date,time,close\n";
    for (const auto& s : bars) {
        for (const auto& b : s.bars)
            out << s.ticker << ',' << format_date(b.ts.day) << ',' << format_time(b.ts.minute) << ','
                << format_double(b.price) << '\n';
    }
}

void write_meta_csv(std::ostream& out, const std::vector<StockMeta>& meta)
{
    out << "ticker,exchange,sector,capitalization\n";
    for (const auto& m : meta) {
        out << m.ticker << ',' << to_string(m.exchange) << ',' << m.sector << ',';
        if (m.capitalization)
            out << format_double(*m.capitalization);
        out << '\n';
    }
}

std::vector<BarSeries> read_bar_file(const fs::path& path)
{
    auto in = open_input(path);
    return parse_bar_file(in, path.string());
}

std::vector<StockMeta> read_meta_file(const fs::path& path)
{
    auto in = open_input(path, ErrorCode::MetaMissing);
    return parse_meta_file(in, path.string());
}

void write_panel(const fs::path& dir, const ReturnPanel& panel)
{
    fs::create_directories(dir);
    std::ostringstream out;
    out << "date,time";
    for (const auto& t : panel.tickers())
        out << ',' << t;
    out << '\n';
    for (std::size_t k = 0; k < panel.n_times(); ++k) {
        out << format_date(panel.timestamps()[k].day) << ',' << format_time(panel.timestamps()[k].minute);
        for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
            out << ',';
            if (!is_missing(panel.at(i, k)))
                out << format_double(panel.at(i, k));
        }
        out << '\n';
    }
    write_file(dir / "returns.csv", out.str());
    std::ostringstream meta;
    write_meta_csv(meta, panel.meta());
    write_file(dir / "meta.csv", meta.str());
}

ReturnPanel read_panel(const fs::path& dir)
{
    const auto returns_path = dir / "returns.csv";
    auto in = open_input(returns_path);
    csv::LineReader reader(in);
    auto header = reader.next();
    if (!header || header->size() < 2 || (*header)[0] != "date" || (*header)[1] != "time")
        throw Error(ErrorCode::MalformedHeader, returns_path.string() + ":1: expected 'date,time,<tickers>'");
    std::vector<std::string> tickers(header->begin() + 2, header->end());

    std::vector<Timestamp> ts;
    std::vector<double> cells;
    while (auto fields = reader.next()) {
        const auto where = returns_path.string() + ":" + std::to_string(reader.line_number());
        if (fields->size() == 1 && fields->front().empty())
            continue;
        if (fields->size() != header->size())
            throw Error(ErrorCode::MalformedRow, where + ": expected " + std::to_string(header->size()) + " fields");
        auto day = parse_date((*fields)[0]);
        auto minute = parse_time((*fields)[1]);
        if (!day || !minute)
            throw Error(ErrorCode::MalformedRow, where + ": bad date/time");
        ts.push_back(Timestamp{*day, *minute});
        for (std::size_t c = 2; c < fields->size(); ++c) {
            if ((*fields)[c].empty()) {
                cells.push_back(kMissing);
                continue;
            }
            auto v = csv::parse_double((*fields)[c]);
            if (!v)
                throw Error(ErrorCode::MalformedRow, where + ": bad return value");
            cells.push_back(*v);
        }
    }
    Grid values(static_cast<Eigen::Index>(tickers.size()), static_cast<Eigen::Index>(ts.size()));
    for (std::size_t k = 0; k < ts.size(); ++k) {
        for (std::size_t i = 0; i < tickers.size(); ++i)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = cells[k * tickers.size() + i];
    }

    const auto meta = read_meta_file(dir / "meta.csv");
    std::vector<StockMeta> row_meta;
    for (const auto& t : tickers) {
        auto it = std::find_if(meta.begin(), meta.end(), [&](const StockMeta& m) { return m.ticker == t; });
        if (it == meta.end())
            throw Error(ErrorCode::MetaMissing, "no metadata for ticker " + t);
        row_meta.push_back(*it);
    }
    return ReturnPanel(std::move(tickers), std::move(ts), std::move(values), std::move(row_meta));
}

Series read_index_bar_file(const fs::path& path)
{
    const auto bars = read_bar_file(path);
    if (bars.size() != 1)
        throw Error(ErrorCode::MalformedRow,
                    path.string() + ": index file must hold exactly one ticker, found " + std::to_string(bars.size()));
    return compute_intraday_returns(bars.front());
}

void write_matrix_csv(std::ostream& out, const CorrelationMatrix& m)
{
    out << "ticker";
    for (const auto& t : m.tickers)
        out << ',' << t;
    out << '\n';
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
        out << m.tickers[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.entries.cols(); ++j)
            out << ',' << format_double(m.entries(i, j));
        out << '\n';
    }
}

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& m)
{
    static_assert(sizeof(double) == 8);
    out.write("RMX1", 4);
    const auto n = static_cast<std::uint32_t>(m.rows());
    unsigned char header[4];
    for (int b = 0; b < 4; ++b)
        header[b] = static_cast<unsigned char>((n >> (8 * b)) & 0xffu);
    out.write(reinterpret_cast<const char*>(header), 4);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            auto bits = std::bit_cast<std::uint64_t>(m(i, j));
            unsigned char bytes[8];
            for (int b = 0; b < 8; ++b)
                bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
            out.write(reinterpret_cast<const char*>(bytes), 8);
        }
    }
}

Eigen::MatrixXd read_matrix_binary(std::istream& in)
{
    char magic[4];
    unsigned char header[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "RMX1", 4) != 0)
        throw Error(ErrorCode::MalformedHeader, "matrix file does not start with RMX1");
    if (!in.read(reinterpret_cast<char*>(header), 4))
        throw Error(ErrorCode::MalformedHeader, "truncated matrix header");
    std::uint32_t n = 0;
    for (int b = 0; b < 4; ++b)
        n |= static_cast<std::uint32_t>(header[b]) << (8 * b);
    Eigen::MatrixXd m(n, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            unsigned char bytes[8];
            if (!in.read(reinterpret_cast<char*>(bytes), 8))
                throw Error(ErrorCode::MalformedRow, "truncated matrix body");
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
            m(i, j) = std::bit_cast<double>(bits);
        }
    }
    return m;
}

void write_histogram_csv(std::ostream& out, const Histogram& h)
{
    out << "bin_left,bin_right,density\n";
    for (std::size_t b = 0; b < h.densities.size(); ++b)
        out << format_double(h.bin_edges[b]) << ',' << format_double(h.bin_edges[b + 1]) << ','
            << format_double(h.densities[b]) << '\n';
}

void write_spectrum_csv(std::ostream& out, const SpectralDecomposition& d)
{
    const double trace = d.eigenvalues.sum();
    out << "k,lambda,variance_fraction\n";
    for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k)
        out << (k + 1) << ',' << format_double(d.eigenvalues(k)) << ',' << format_double(d.eigenvalues(k) / trace)
            << '\n';
}

void write_eigenvectors_csv(std::ostream& out, const SpectralDecomposition& d, const std::vector<std::string>& tickers,
                            std::span<const std::size_t> ranks)
{
    out << "ticker";
    for (auto k : ranks)
        out << ",u_" << k;
    out << '\n';
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        out << tickers[i];
        for (auto k : ranks)
            out << ',' << format_double(d.eigenvectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k - 1)));
        out << '\n';
    }
}

void write_sign_tables_csv(std::ostream& out, const std::vector<SignTable>& tables)
{
    out << "k,group,pos_pct,neg_pct\n";
    for (const auto& t : tables) {
        for (std::size_t g = 0; g < t.groups.size(); ++g)
            out << t.k << ',' << t.groups[g] << ',' << format_double(t.pos_pct[g]) << ','
                << format_double(t.neg_pct[g]) << '\n';
    }
}

void write_eigenportfolio_csv(std::ostream& out, const EigenportfolioSeries& p, const Series& index_returns)
{
    out << "date,time,R_k,R_m\n";
    std::size_t j = 0;
    for (std::size_t a = 0; a < p.returns.size(); ++a) {
        const auto ts = p.returns.timestamps[a];
        while (j < index_returns.size() && index_returns.timestamps[j] < ts)
            ++j;
        out << format_date(ts.day) << ',' << format_time(ts.minute) << ',' << format_double(p.returns.values[a]) << ',';
        if (j < index_returns.size() && index_returns.timestamps[j] == ts)
            out << format_double(index_returns.values[j]);
        out << '\n';
    }
}

void write_series_csv(std::ostream& out, const Series& s, std::string_view value_name)
{
    out << "date,time," << value_name << '\n';
    for (std::size_t a = 0; a < s.size(); ++a)
        out << format_date(s.timestamps[a].day) << ',' << format_time(s.timestamps[a].minute) << ','
            << format_double(s.values[a]) << '\n';
}

nlohmann::ordered_json to_json(const MPReference& ref)
{
    return {{"q", ref.q}, {"lambda_min", ref.lambda_min}, {"lambda_max", ref.lambda_max}};
}

nlohmann::ordered_json to_json(const DeviationReport& r)
{
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["lambda_min"] = r.lambda_min;
    j["lambda_max"] = r.lambda_max;
    j["lambda_1"] = r.lambda_1;
    j["n_below"] = r.n_below;
    j["pct_below"] = r.pct_below;
    j["n_above"] = r.n_above;
    j["pct_above"] = r.pct_above;
    j["absorption_ratio"] = r.absorption_ratio;
    j["lambda1_variance_fraction"] = r.lambda1_variance_fraction;
    j["trace"] = r.trace;
    auto fractions = nlohmann::ordered_json::array();
    for (auto [k, f] : r.variance_fractions)
        fractions.push_back({{"k", k}, {"variance_fraction", f}});
    j["variance_fractions"] = fractions;
    return j;
}

nlohmann::ordered_json to_json(const MarketRegression& r, std::size_t k)
{
    return {{"k", k},
            {"slope", number_or_null(r.slope)},
            {"intercept", number_or_null(r.intercept)},
            {"stderr", number_or_null(r.slope_stderr)},
            {"r2", number_or_null(r.r_squared)},
            {"n", r.n_points},
            {"inverse_slope", number_or_null(r.inverse_slope)}};
}

nlohmann::ordered_json to_json(const CapCorrelation& c)
{
    return {{"k", c.k},
            {"subset", std::string(to_string(c.subset))},
            {"pearson_log_cap", c.pearson_log_cap},
            {"spearman", c.spearman},
            {"n", c.n}};
}

nlohmann::ordered_json to_json(const CoefficientSummary& s)
{
    return {{"count", s.count},
            {"mean", s.mean},
            {"min", s.min},
            {"max", s.max},
            {"negative_fraction", s.negative_fraction}};
}

nlohmann::ordered_json to_json(const GroundTruth& t)
{
    nlohmann::ordered_json j;
    j["betas"] = t.betas;
    j["group_labels"] = t.group_labels;
    j["sector_labels"] = t.sector_labels;
    j["capitalizations"] = t.capitalizations;
    auto factor = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < t.factor.size(); ++a)
        factor.push_back({format_date(t.factor.timestamps[a].day), format_time(t.factor.timestamps[a].minute),
                          t.factor.values[a], t.group_factor.values[a]});
    j["factor_columns"] = {"date", "time", "market", "group"};
    j["factor"] = factor;
    return j;
}

void write_file(const fs::path& path, const std::string& contents)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string read_file(const fs::path& path)
{
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace rmtcorr::io
