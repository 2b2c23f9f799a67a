#pragma once

// Flat microcanonical degree-corrected stochastic block model for directed
// multigraphs. Edge weights enter as multiplicities: an edge of weight w is
// w parallel edges.
//
// Description length (nats), lower is better:
//
//   S = S_edges + S_matrix + S_degrees + S_partition
//
//   S_edges     = sum_r ln e_r+! + ln e_r-!  - sum_rs ln e_rs!
//                 - sum_i ln k_i+! + ln k_i-!  + sum_ij ln A_ij!
//   S_matrix    = ln multiset(B*B, E)
//   S_degrees   = sum_r ln multiset(n_r, e_r+) + ln multiset(n_r, e_r-)
//   S_partition = ln C(N-1, B-1) + ln N! - sum_r ln n_r! + ln N
//
// where e_rs counts edges from block r to block s, e_r+/e_r- are block out-
// and in-totals, k_i+/k_i- are node out- and in-strengths, n_r block sizes
// and multiset(n, k) = C(n+k-1, k).

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "polarshift/graph.hpp"

namespace polarshift {

using BlockId = std::uint32_t;

enum class InitMode { agglomerative, random };

struct McmcConfig {
    std::uint64_t seed = 42;
    std::size_t sweeps = 1000;
    std::size_t chains = 4;
    InitMode init = InitMode::agglomerative;
    /// Proposal smoothing; non-positive means 1/B.
    double epsilon = 0.0;
    /// Inverse temperature of the Metropolis-Hastings acceptance.
    double beta = 1.0;
    std::size_t early_stop_window = 50;
    double early_stop_tol = 1e-6;
    /// Fraction of blocks removed per agglomerative round, in (0, 1].
    double merge_fraction = 0.5;
    /// Run chains on separate threads. Results do not depend on this.
    bool parallel = true;
};

struct Partition {
    std::vector<BlockId> assignment; ///< node index -> block
    BlockId blocks = 0;
    double description_length = 0.0;
    std::uint64_t seed = 0;
    std::size_t sweeps = 0; ///< sweeps run by the winning chain
    std::size_t chain = 0;

    std::size_t block_size(BlockId r) const;
};

/// Pure; throws DataError if the assignment does not cover the graph
/// exactly or references a block >= B.
double description_length(const InteractionGraph& graph, std::span<const BlockId> assignment, BlockId blocks);

/// Incremental block statistics supporting O(deg + B^2) single-node move
/// deltas. Blocks are dense; intended for small B.
class BlockState {
public:
    BlockState(const InteractionGraph& graph, std::vector<BlockId> assignment, BlockId blocks);

    BlockId blocks() const noexcept { return blocks_; }
    BlockId block_of(NodeIndex v) const { return assignment_[v]; }
    std::size_t block_size(BlockId r) const { return sizes_[r]; }
    const std::vector<BlockId>& assignment() const noexcept { return assignment_; }

    /// Change in description length if v moved to block s.
    double move_delta(NodeIndex v, BlockId s) const;
    void move(NodeIndex v, BlockId s);

    /// Full recomputation from the current counts.
    double entropy() const;

    /// Weighted number of edges (either direction) between v and each block.
    void neighbour_block_weights(NodeIndex v, std::vector<double>& out) const;

private:
    std::uint64_t& e(BlockId r, BlockId s) { return matrix_[std::size_t{r} * blocks_ + s]; }
    std::uint64_t e(BlockId r, BlockId s) const { return matrix_[std::size_t{r} * blocks_ + s]; }
    void node_block_counts(NodeIndex v, std::vector<std::uint64_t>& out_to, std::vector<std::uint64_t>& in_from) const;

    const InteractionGraph* graph_;
    BlockId blocks_;
    std::vector<BlockId> assignment_;
    std::vector<std::uint64_t> matrix_;
    std::vector<std::uint64_t> block_out_, block_in_, sizes_;
    mutable std::vector<std::uint64_t> scratch_out_, scratch_in_;
};

/// Greedy agglomeration from singletons down to `blocks` blocks. Each round
/// merges disjoint block pairs in increasing order of description-length
/// change; ties go to the pair with the lowest node indices. Deterministic.
std::vector<BlockId> agglomerative_init(const InteractionGraph& graph, BlockId blocks, double merge_fraction = 0.5);

/// Lowest-description-length partition over cfg.chains Metropolis-Hastings
/// chains (chain c seeded from seed + c). Inference runs on nodes sorted by
/// user id, so the result depends only on graph content, B and cfg. Blocks
/// in the result are numbered by their smallest member user id.
///
/// Throws ConfigError for B == 0, zero sweeps or zero chains, DataError
/// for an empty graph or B greater than the node count.
Partition infer_partition(const InteractionGraph& graph, BlockId blocks, const McmcConfig& cfg);

} // namespace polarshift
