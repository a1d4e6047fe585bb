#include "rmtcorr/groupsep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "stats.hpp"

namespace rmtcorr {

SignTable sign_separation(std::span<const double> u, std::span<const std::string> labels, std::size_t k,
                          std::vector<std::string> group_order)
{
    if (u.empty())
        throw Error(ErrorCode::EmptyVector, "sign separation of an empty vector");
    if (labels.size() != u.size())
        throw Error(ErrorCode::InvalidConfig, "label count does not match vector length");

    SignTable t;
    t.k = k;
    if (group_order.empty()) {
        std::set<std::string> unique(labels.begin(), labels.end());
        t.groups.assign(unique.begin(), unique.end());
    } else {
        t.groups = std::move(group_order);
    }
    std::map<std::string, std::size_t> slot;
    for (std::size_t g = 0; g < t.groups.size(); ++g)
        slot.emplace(t.groups[g], g);
    t.pos_count.assign(t.groups.size(), 0);
    t.neg_count.assign(t.groups.size(), 0);

    std::size_t pos_total = 0;
    std::size_t neg_total = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        auto it = slot.find(labels[i]);
        if (it == slot.end())
            throw Error(ErrorCode::InvalidConfig, "label '" + labels[i] + "' is not in the group list");
        if (u[i] > 0.0) {
            ++t.pos_count[it->second];
            ++pos_total;
        } else if (u[i] < 0.0) {
            ++t.neg_count[it->second];
            ++neg_total;
        } else {
            ++t.zero_count;
        }
    }
    t.pos_pct.assign(t.groups.size(), 0.0);
    t.neg_pct.assign(t.groups.size(), 0.0);
    for (std::size_t g = 0; g < t.groups.size(); ++g) {
        if (pos_total > 0)
            t.pos_pct[g] = 100.0 * static_cast<double>(t.pos_count[g]) / static_cast<double>(pos_total);
        if (neg_total > 0)
            t.neg_pct[g] = 100.0 * static_cast<double>(t.neg_count[g]) / static_cast<double>(neg_total);
    }
    return t;
}

double separation_score(const SignTable& table)
{
    if (table.groups.size() != 2)
        throw Error(ErrorCode::NotBinary,
                    "separation score needs exactly 2 groups, got " + std::to_string(table.groups.size()));
    const double size_a = static_cast<double>(table.pos_count[0] + table.neg_count[0]);
    const double size_b = static_cast<double>(table.pos_count[1] + table.neg_count[1]);
    if (size_a == 0.0 || size_b == 0.0)
        throw Error(ErrorCode::TooFewPoints, "a group has no signed components");
    // Assignment "positive -> first group"; the other assignment scores 1 - this.
    const double accuracy = 0.5 * (static_cast<double>(table.pos_count[0]) / size_a +
                                   static_cast<double>(table.neg_count[1]) / size_b);
    return std::max(accuracy, 1.0 - accuracy);
}

std::string_view to_string(SignSubset s) noexcept
{
    switch (s) {
    case SignSubset::All: return "all";
    case SignSubset::Positive: return "positive";
    case SignSubset::Negative: return "negative";
    }
    return "all";
}

CapCorrelation cap_component_correlation(std::span<const double> u, std::span<const std::optional<double>> caps,
                                         SignSubset subset, std::size_t k)
{
    if (caps.size() != u.size())
        throw Error(ErrorCode::InvalidConfig, "capitalization count does not match vector length");
    std::vector<double> magnitude;
    std::vector<double> log_cap;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!caps[i] || !(*caps[i] > 0.0))
            continue;
        if (subset == SignSubset::Positive && !(u[i] > 0.0))
            continue;
        if (subset == SignSubset::Negative && !(u[i] < 0.0))
            continue;
        magnitude.push_back(std::abs(u[i]));
        log_cap.push_back(std::log(*caps[i]));
    }
    if (magnitude.size() < 3)
        throw Error(ErrorCode::TooFewPoints, "cap correlation needs >= 3 stocks in subset '" +
                                                 std::string(to_string(subset)) + "', got " +
                                                 std::to_string(magnitude.size()));

    CapCorrelation c;
    c.k = k;
    c.subset = subset;
    c.n = magnitude.size();
    c.pearson_log_cap = stats::pearson(magnitude, log_cap);
    const auto rank_m = stats::average_ranks(magnitude);
    const auto rank_c = stats::average_ranks(log_cap);
    c.spearman = stats::pearson(rank_m, rank_c);
    if (std::isnan(c.pearson_log_cap) || std::isnan(c.spearman))
        throw Error(ErrorCode::TooFewPoints, "component magnitudes or capitalizations are constant on the subset");
    return c;
}

} // namespace rmtcorr
