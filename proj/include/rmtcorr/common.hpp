#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rmtcorr {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorCode {
    IoError,
    MalformedHeader,
    MalformedRow,
    NonPositivePrice,
    DuplicateBar,
    MetaMissing,
    EmptyUniverse,
    InsufficientOverlap,
    DegenerateIndex,
    IndexColinearStock,
    EmptyMatrix,
    ConvergenceFailure,
    InvalidQ,
    DegenerateNormalizer,
    EmptyVector,
    NotBinary,
    TooFewPoints,
    InvalidConfig,
};

/// Coarse error class; the CLI maps these onto exit codes 2, 3 and 4.
enum class ErrorClass { Input, Numeric, Config };

std::string_view to_string(ErrorCode code) noexcept;
ErrorClass classify(ErrorCode code) noexcept;

/// Every library failure is reported through this type. The message is
/// prefixed with the code name, e.g. "NonPositivePrice: bars.csv:12: ...".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    ErrorClass error_class() const noexcept { return classify(code_); }

private:
    ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Time keys
// ---------------------------------------------------------------------------

/// A bar or return key: trading day (days since 1970-01-01) and the minute
/// of the exchange session clock (minutes after midnight, session time).
struct Timestamp {
    std::int32_t day = 0;
    std::int32_t minute = 0;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Parses YYYY-MM-DD into a day number; nullopt on any syntax or calendar error.
std::optional<std::int32_t> parse_date(std::string_view text);
/// Parses HH:MM into minutes after midnight.
std::optional<std::int32_t> parse_time(std::string_view text);
std::string format_date(std::int32_t day);
std::string format_time(std::int32_t minute);

/// Timestamp-keyed values, strictly increasing keys.
struct Series {
    std::vector<Timestamp> timestamps;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    void push_back(Timestamp ts, double v)
    {
        timestamps.push_back(ts);
        values.push_back(v);
    }
};

// ---------------------------------------------------------------------------
// Dense storage
// ---------------------------------------------------------------------------

/// Stocks x timestamps, each stock row contiguous.
using Grid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// MISSING cell marker. Observed values are always finite.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return v != v; }

enum class MatrixKind { Raw, Partial, Null };
std::string_view to_string(MatrixKind kind) noexcept;

/// Shortest round-trip decimal form of a double ("nan"/"inf" for non-finite).
std::string format_double(double v);

} // namespace rmtcorr
