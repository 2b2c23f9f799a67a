#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "polarshift/ingest.hpp"
#include "polarshift/types.hpp"

namespace polarshift {

using NodeIndex = std::uint32_t;

struct Edge {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    std::uint64_t weight = 1;

    bool operator==(const Edge&) const = default;
};

/// Directed weighted retweet graph for one window. Edges point from the
/// content creator to the retweeter; parallel retweets are folded into the
/// weight. Immutable once built.
class InteractionGraph {
public:
    InteractionGraph() = default;

    /// Validates and indexes. Edges may come in any order; they are stored
    /// sorted by (src, dst). Throws DataError on self-loops, zero weights,
    /// duplicate (src, dst) pairs, out-of-range indices or duplicate users.
    InteractionGraph(std::string window, std::vector<UserId> users, std::vector<std::string> handles,
                     std::vector<Edge> edges);

    const std::string& window() const noexcept { return window_; }
    std::size_t node_count() const noexcept { return users_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return users_.empty(); }

    const std::vector<UserId>& users() const noexcept { return users_; }
    const std::vector<std::string>& handles() const noexcept { return handles_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    const UserId& user(NodeIndex v) const { return users_.at(v); }
    const std::string& handle(NodeIndex v) const { return handles_.at(v); }
    std::optional<NodeIndex> find(const UserId& id) const;
    std::optional<NodeIndex> find_handle(const std::string& handle) const;

    /// Edge indices leaving / entering v (into edges()).
    std::span<const std::uint32_t> out_edges(NodeIndex v) const;
    std::span<const std::uint32_t> in_edges(NodeIndex v) const;

    /// Weighted counts: retweets v received (out) and made (in).
    std::uint64_t out_strength(NodeIndex v) const noexcept { return out_strength_[v]; }
    std::uint64_t in_strength(NodeIndex v) const noexcept { return in_strength_[v]; }
    std::uint64_t total_weight() const noexcept { return total_weight_; }

    bool operator==(const InteractionGraph& other) const;

private:
    std::string window_;
    std::vector<UserId> users_;
    std::vector<std::string> handles_;
    std::vector<Edge> edges_;
    std::unordered_map<UserId, NodeIndex> index_;
    std::vector<std::uint32_t> out_offsets_, out_list_;
    std::vector<std::uint32_t> in_offsets_, in_list_;
    std::vector<std::uint64_t> out_strength_, in_strength_;
    std::uint64_t total_weight_ = 0;
};

/// One edge creator -> retweeter per pair, weight = number of retweet events.
/// Nodes are indexed in order of first appearance; only retweets create
/// nodes. Handles are the most recently observed (by timestamp, then input
/// order) across all records in the slice.
InteractionGraph build_graph(std::span<const TweetRecord> records, const std::string& window);

/// Keeps nodes with made > threshold or received > threshold, where counts
/// are weighted events on the unfiltered graph (single pass, no iteration).
/// Survivors keep their relative order.
InteractionGraph filter_by_activity(const InteractionGraph& graph, std::uint64_t threshold = 5);

/// `src,dst,weight` rows sorted by (src, dst) user id.
void export_edgelist(const InteractionGraph& graph, const std::string& path);

/// `user_id,handle,in_count,out_count` rows in node-index order.
void export_node_table(const InteractionGraph& graph, const std::string& path);

/// Inverse of export_edgelist + export_node_table.
InteractionGraph import_graph(const std::string& edges_path, const std::string& nodes_path,
                              const std::string& window);

} // namespace polarshift
