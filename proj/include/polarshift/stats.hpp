#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polarshift/shift.hpp"
#include "polarshift/types.hpp"

namespace polarshift {

/// Every stochastic operation draws from std::mt19937_64. Independent
/// streams come from (seed, stream) pairs expanded through std::seed_seq.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Stable 64-bit stream id for a name (FNV-1a).
std::uint64_t stream_id(std::string_view name);

struct BootstrapSummary {
    double mean_of_means = 0.0;
    double std_of_means = 0.0; ///< population convention (divisor = iterations)
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::size_t sample_size = 0;   ///< observations in the data
    std::size_t resample_size = 0; ///< draws per iteration
    double raw_mean = 0.0;
    double raw_std = 0.0; ///< population std of the data itself

    bool operator==(const BootstrapSummary&) const = default;
};

/// Each iteration draws resample_size = max(1, round(subsample_fraction *
/// |data|)) values with replacement and records their mean. Throws
/// DataError on empty data, ConfigError on bad iterations/fraction.
BootstrapSummary bootstrap_mean(std::span<const double> data, std::size_t iterations, std::uint64_t seed,
                                double subsample_fraction = 1.0);

enum class TestMethod { mann_whitney_u_exact, mann_whitney_u_normal, kruskal_wallis_chi2 };

std::string_view to_string(TestMethod m);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::mann_whitney_u_normal;
    std::vector<std::size_t> n_per_group;
    bool tie_correction_applied = false;
    /// Mann-Whitney only: (U - nm/2) / sd with tie-corrected sd and no
    /// continuity correction. Zero when the variance vanishes.
    std::optional<double> z;
};

/// Midranks (1-based) of the pooled sample, in input order.
std::vector<double> midranks(std::span<const double> pooled);

/// U for x (rank sum of x minus n(n+1)/2). When both samples have at most
/// exact_cutoff values the two-sided p comes from the full permutation
/// distribution of the rank sum (conditional on ties); otherwise from the
/// normal approximation with tie and continuity corrections. Two-sided
/// p = min(1, 2 * one-sided). Throws DataError on an empty sample.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y, std::size_t exact_cutoff = 8);

/// Tie-corrected H with a chi-square (k-1 df) tail. Needs at least two
/// groups, none empty.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

struct StatsConfig {
    std::size_t bootstrap_iterations = 10000;
    double subsample_fraction = 1.0;
    std::size_t exact_cutoff = 8;
    double alpha = 0.01;
};

/// Bootstrap summaries of both groups plus both nonparametric tests.
struct GroupComparison {
    std::string name_a, name_b;
    BootstrapSummary a, b;
    TestResult mwu, kw;
    bool significant = false; ///< both tests below alpha
};

GroupComparison compare_groups(std::string name_a, std::span<const double> a, std::string name_b,
                               std::span<const double> b, const StatsConfig& cfg, std::uint64_t seed);

/// Bootstrap summaries of per-user (s_t2 - s_t1), one cell per
/// (label_t1, label_t2) pair. Empty cells stay unset.
struct DeltaMatrix {
    std::vector<std::string> labels;
    std::map<std::pair<std::string, std::string>, std::optional<BootstrapSummary>> cells;
    std::map<std::pair<std::string, std::string>, std::vector<double>> deltas;
    std::size_t missing_sentiment = 0; ///< cross-window users lacking a score in either window

    const std::optional<BootstrapSummary>& cell(const std::string& t1, const std::string& t2) const;
};

DeltaMatrix delta_sentiment_matrix(const std::vector<ShiftRecord>& shifts,
                                   const std::map<UserId, double>& sentiment_t1,
                                   const std::map<UserId, double>& sentiment_t2, const StatsConfig& cfg,
                                   std::uint64_t seed);

} // namespace polarshift
