#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmtcorr/corrmat.hpp"
#include "rmtcorr/synth.hpp"

namespace rmtcorr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitConfig = 4;

/// Everything a subcommand may read. Populated from flags and/or a
/// `key = value` config file (flags win).
struct RunConfig {
    std::filesystem::path bars;
    std::filesystem::path meta;
    std::filesystem::path panel;
    std::filesystem::path out;

    std::string index_ticker;
    std::filesystem::path index_file;
    std::string index_weighting = "equal";

    bool listwise = false;
    bool lenient = false;
    std::size_t min_overlap = 100;
    std::size_t min_days = 0;
    std::size_t min_obs = 0;
    std::size_t bins = 100;
    std::size_t top_k = 5;
    std::size_t shuffle_null = 0;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    bool matrix_csv = false;
    bool partial = false;
    std::string group_by = "exchange";
    std::vector<std::size_t> ranks;

    SynthConfig synth;
    std::vector<std::string> sector_blocks;

    CorrelationOptions correlation_options() const;
};

/// Runs one command line (argv[0] is the program name). Never throws;
/// returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rmtcorr::cli
