#pragma once

// Minimal comma-separated reader for the fixed, unquoted formats used here.

#include <charconv>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rmtcorr::csv {

inline std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::optional<std::vector<std::string>> next()
    {
        std::string line;
        if (!std::getline(in_, line))
            return std::nullopt;
        ++line_;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return split(line);
    }

    std::size_t line_number() const noexcept { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

inline std::optional<double> parse_double(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

} // namespace rmtcorr::csv
