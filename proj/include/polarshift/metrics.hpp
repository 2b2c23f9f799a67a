#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polarshift/graph.hpp"

namespace polarshift {

struct UserMetrics {
    UserId user;
    std::uint64_t in_degree = 0;  ///< retweets the user made
    std::uint64_t out_degree = 0; ///< times the user was retweeted
    double pagerank = 0.0;
    double betweenness = 0.0; ///< normalized by (n-1)(n-2)

    bool operator==(const UserMetrics&) const = default;
};

struct DegreePair {
    std::uint64_t in = 0;
    std::uint64_t out = 0;
};

/// Weighted degrees by node index. Edges run creator -> retweeter, so
/// in-degree counts retweets made and out-degree counts times retweeted.
std::vector<DegreePair> degrees(const InteractionGraph& graph);

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-10; ///< L1 change between iterates
    std::size_t max_iter = 200;
};

/// Weighted PageRank by node index: transition probabilities proportional
/// to edge weight, uniform teleport, dangling mass spread uniformly.
/// Throws DataError on an empty graph and ConvergenceError (carrying the
/// last L1 residual) if max_iter is reached.
std::vector<double> pagerank(const InteractionGraph& graph, const PageRankOptions& opts = {});

/// Directed shortest-path betweenness ignoring edge weights (Brandes),
/// normalized by (n-1)(n-2). All zeros when n < 3. Sources are processed
/// in fixed chunks reduced in index order, so the result is bitwise
/// independent of `threads`.
std::vector<double> betweenness(const InteractionGraph& graph, unsigned threads = 0);

std::vector<UserMetrics> compute_metrics(const InteractionGraph& graph, const PageRankOptions& opts = {});

void write_metrics_csv(const std::vector<UserMetrics>& metrics, const std::string& path);
std::vector<UserMetrics> read_metrics_csv(const std::string& path);

} // namespace polarshift
