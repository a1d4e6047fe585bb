#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmtcorr/common.hpp"

namespace rmtcorr {

/// Group composition of the positive and negative components of one eigenvector.
struct SignTable {
    std::size_t k = 0;
    std::vector<std::string> groups;
    std::vector<std::size_t> pos_count;
    std::vector<std::size_t> neg_count;
    std::vector<double> pos_pct; ///< share of positive components per group, in percent
    std::vector<double> neg_pct;
    std::size_t zero_count = 0;
};

/// Groups are listed in `group_order` when given, otherwise sorted. Exact
/// zeros are excluded from both rows and counted in zero_count.
SignTable sign_separation(std::span<const double> u, std::span<const std::string> labels, std::size_t k = 0,
                          std::vector<std::string> group_order = {});

/// Balanced accuracy of predicting the group from the component sign,
/// maximized over both sign-to-group assignments. Requires exactly 2 groups.
double separation_score(const SignTable& table);

enum class SignSubset { All, Positive, Negative };
std::string_view to_string(SignSubset s) noexcept;

struct CapCorrelation {
    std::size_t k = 0;
    SignSubset subset = SignSubset::All;
    double pearson_log_cap = 0.0;
    double spearman = 0.0;
    std::size_t n = 0;
};

/// Correlation of |u_i| with log capitalization over the selected sign
/// subset; stocks without a capitalization are skipped.
CapCorrelation cap_component_correlation(std::span<const double> u, std::span<const std::optional<double>> caps,
                                         SignSubset subset, std::size_t k = 0);

} // namespace rmtcorr
