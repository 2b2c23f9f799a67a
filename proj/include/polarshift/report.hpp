#pragma once

#include <map>
#include <string>
#include <vector>

#include "polarshift/communities.hpp"
#include "polarshift/metrics.hpp"
#include "polarshift/sentiment.hpp"
#include "polarshift/shift.hpp"
#include "polarshift/stats.hpp"

namespace polarshift {

inline constexpr const char* kShifterGroup = "u_c";
inline constexpr const char* kStayerGroup = "u_nc";

struct MetricComparison {
    std::string metric; ///< in_degree, out_degree, pagerank or betweenness
    GroupComparison comparison; ///< group a = shifters, b = stayers
};

/// Shifters vs stayers on each metric measured at t1. Users without t1
/// metrics are skipped. Throws DataError naming the class if either has
/// fewer than two users.
std::vector<MetricComparison> metrics_comparison(const std::vector<ShiftRecord>& shifts,
                                                 const std::vector<UserMetrics>& metrics_t1, const StatsConfig& cfg,
                                                 std::uint64_t seed);

struct AlignmentShare {
    std::string expected; ///< "positive" or "negative"
    std::size_t members = 0; ///< members with a sentiment score
    std::size_t aligned = 0;
    double fraction = 0.0;
};

/// Label -> expected class, e.g. republican -> positive.
using PolarityMap = std::map<std::string, SentimentClass>;

/// Per labeled community, the share of scored members whose class matches
/// the expected polarity. Neutral users count toward the denominator only.
/// Throws DataError for a community with no scored member.
std::map<std::string, AlignmentShare> alignment_pct(const CommunitySnapshot& snapshot,
                                                    const std::vector<UserSentiment>& sentiments,
                                                    const PolarityMap& polarity);

struct HistogramBin {
    double left = 0.0, right = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins over [-1, 1]. Bin i covers [left_i, left_{i+1}); the
/// last bin also takes 1.0. Throws ConfigError for bins == 0 and DataError
/// for values outside [-1, 1].
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins);

/// `bin_left,bin_right,count`.
void histogram_export(std::span<const double> values, std::size_t bins, const std::string& path);
std::vector<HistogramBin> read_histogram_csv(const std::string& path);

/// Static bar chart of a histogram.
void write_histogram_svg(const std::vector<HistogramBin>& bins, const std::string& title, const std::string& path);

} // namespace polarshift
