#include "rmtcorr/common.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace rmtcorr {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::DuplicateBar: return "DuplicateBar";
    case ErrorCode::MetaMissing: return "MetaMissing";
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::DegenerateIndex: return "DegenerateIndex";
    case ErrorCode::IndexColinearStock: return "IndexColinearStock";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::InvalidQ: return "InvalidQ";
    case ErrorCode::DegenerateNormalizer: return "DegenerateNormalizer";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::NotBinary: return "NotBinary";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::MalformedHeader:
    case ErrorCode::MalformedRow:
    case ErrorCode::NonPositivePrice:
    case ErrorCode::DuplicateBar:
    case ErrorCode::MetaMissing:
    case ErrorCode::EmptyUniverse:
        return ErrorClass::Input;
    case ErrorCode::InvalidConfig:
        return ErrorClass::Config;
    default:
        return ErrorClass::Numeric;
    }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
{
}

namespace {

std::optional<int> parse_fixed_int(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

} // namespace

std::optional<std::int32_t> parse_date(std::string_view text)
{
    using namespace std::chrono;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        return std::nullopt;
    auto y = parse_fixed_int(text.substr(0, 4));
    auto m = parse_fixed_int(text.substr(5, 2));
    auto d = parse_fixed_int(text.substr(8, 2));
    if (!y || !m || !d)
        return std::nullopt;
    year_month_day ymd{year{*y}, month{static_cast<unsigned>(*m)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok())
        return std::nullopt;
    return static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count());
}

std::optional<std::int32_t> parse_time(std::string_view text)
{
    if (text.size() != 5 || text[2] != ':')
        return std::nullopt;
    auto h = parse_fixed_int(text.substr(0, 2));
    auto m = parse_fixed_int(text.substr(3, 2));
    if (!h || !m || *h < 0 || *h > 23 || *m < 0 || *m > 59)
        return std::nullopt;
    return *h * 60 + *m;
}

std::string format_date(std::int32_t day)
{
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_time(std::int32_t minute)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minute / 60, minute % 60);
    return buf;
}

std::string_view to_string(MatrixKind kind) noexcept
{
    switch (kind) {
    case MatrixKind::Raw: return "raw";
    case MatrixKind::Partial: return "partial";
    case MatrixKind::Null: return "null";
    }
    return "unknown";
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace rmtcorr
