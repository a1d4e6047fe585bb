#pragma once

// File formats shared by the CLI, the Python module and the plotting tools.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtcorr/corrmat.hpp"
#include "rmtcorr/eigenportfolio.hpp"
#include "rmtcorr/groupsep.hpp"
#include "rmtcorr/ingest.hpp"
#include "rmtcorr/spectra.hpp"
#include "rmtcorr/synth.hpp"

namespace rmtcorr::io {

// Minute bars and metadata (`ticker,date,time,close`, `ticker,exchange,sector,capitalization`).
void write_bar_csv(std::ostream& out, const std::vector<BarSeries>& bars);
void write_meta_csv(std::ostream& out, const std::vector<StockMeta>& meta);

std::vector<BarSeries> read_bar_file(const std::filesystem::path& path);
std::vector<StockMeta> read_meta_file(const std::filesystem::path& path);

/// Panel artifact: `returns.csv` (wide, `date,time,<ticker>...`, empty cell
/// = MISSING) plus `meta.csv` inside one directory.
void write_panel(const std::filesystem::path& dir, const ReturnPanel& panel);
ReturnPanel read_panel(const std::filesystem::path& dir);

/// A single-ticker minute-bar file turned into intraday returns.
Series read_index_bar_file(const std::filesystem::path& path);

// Correlation matrices: dense CSV with ticker header row/column, or the
// binary form `RMX1`, u32 N, N*N little-endian float64 row-major.
void write_matrix_csv(std::ostream& out, const CorrelationMatrix& m);
void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_binary(std::istream& in);

/// `bin_left,bin_right,density`
void write_histogram_csv(std::ostream& out, const Histogram& h);
/// `k,lambda,variance_fraction`
void write_spectrum_csv(std::ostream& out, const SpectralDecomposition& d);
/// `ticker,u_1,...` for the requested 1-based ranks.
void write_eigenvectors_csv(std::ostream& out, const SpectralDecomposition& d, const std::vector<std::string>& tickers,
                            std::span<const std::size_t> ranks);
/// `k,group,pos_pct,neg_pct`
void write_sign_tables_csv(std::ostream& out, const std::vector<SignTable>& tables);
/// `date,time,R_k,R_m`; R_m left empty where the index is absent.
void write_eigenportfolio_csv(std::ostream& out, const EigenportfolioSeries& p, const Series& index_returns);
/// `date,time,value`
void write_series_csv(std::ostream& out, const Series& s, std::string_view value_name);

nlohmann::ordered_json to_json(const MPReference& ref);
nlohmann::ordered_json to_json(const DeviationReport& r);
nlohmann::ordered_json to_json(const MarketRegression& r, std::size_t k);
nlohmann::ordered_json to_json(const CapCorrelation& c);
nlohmann::ordered_json to_json(const CoefficientSummary& s);
nlohmann::ordered_json to_json(const GroundTruth& t);

/// Writes text/bytes to a file, throwing IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

} // namespace rmtcorr::io
