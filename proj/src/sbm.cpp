#include "polarshift/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <tuple>

namespace polarshift {

namespace {

double lfact(double x) { return std::lgamma(x + 1.0); }

double lbinom(double n, double k) { return lfact(n) - lfact(k) - lfact(n - k); }

// ln C(n + k - 1, k): number of ways to distribute k edge ends over n nodes.
double lmultiset(double n, double k) { return k == 0 ? 0.0 : lbinom(n + k - 1, k); }

double u(std::uint64_t x) { return static_cast<double>(x); }

// Terms that do not depend on the partition.
double constant_terms(const InteractionGraph& g) {
    double s = 0.0;
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        s -= lfact(u(g.out_strength(v))) + lfact(u(g.in_strength(v)));
    for (const Edge& e : g.edges())
        s += lfact(u(e.weight));
    return s;
}

double partition_prior(std::size_t nodes, std::size_t blocks, std::span<const std::uint64_t> sizes) {
    const double n = u(nodes);
    double s = lbinom(n - 1, u(blocks) - 1) + lfact(n) + std::log(n);
    for (std::uint64_t nr : sizes)
        s -= lfact(u(nr));
    return s;
}

} // namespace

std::size_t Partition::block_size(BlockId r) const {
    return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), r));
}

double description_length(const InteractionGraph& graph, std::span<const BlockId> assignment, BlockId blocks) {
    const std::size_t n = graph.node_count();
    if (assignment.size() != n)
        throw DataError("description_length: assignment covers " + std::to_string(assignment.size()) +
                        " nodes, graph has " + std::to_string(n));
    if (blocks == 0 || n == 0)
        throw DataError("description_length: empty graph or zero blocks");
    for (BlockId b : assignment)
        if (b >= blocks)
            throw DataError("description_length: block id " + std::to_string(b) + " >= B=" + std::to_string(blocks));

    std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
    cells.reserve(graph.edge_count());
    std::vector<std::uint64_t> bout(blocks, 0), bin(blocks, 0), sizes(blocks, 0);
    for (BlockId b : assignment)
        ++sizes[b];
    for (const Edge& e : graph.edges()) {
        const BlockId r = assignment[e.src], s = assignment[e.dst];
        cells.emplace_back(std::uint64_t{r} * blocks + s, e.weight);
        bout[r] += e.weight;
        bin[s] += e.weight;
    }
    std::sort(cells.begin(), cells.end());

    double S = 0.0;
    for (std::size_t i = 0; i < cells.size();) {
        std::uint64_t total = 0;
        std::size_t j = i;
        for (; j < cells.size() && cells[j].first == cells[i].first; ++j)
            total += cells[j].second;
        S -= lfact(u(total));
        i = j;
    }
    for (BlockId r = 0; r < blocks; ++r) {
        S += lfact(u(bout[r])) + lfact(u(bin[r]));
        S += lmultiset(u(sizes[r]), u(bout[r])) + lmultiset(u(sizes[r]), u(bin[r]));
    }
    S += constant_terms(graph);
    S += lmultiset(u(blocks) * u(blocks), u(graph.total_weight()));
    S += partition_prior(n, blocks, sizes);
    return S;
}

// ---------------------------------------------------------------------------
// BlockState

BlockState::BlockState(const InteractionGraph& graph, std::vector<BlockId> assignment, BlockId blocks)
    : graph_(&graph), blocks_(blocks), assignment_(std::move(assignment)) {
    if (assignment_.size() != graph.node_count())
        throw DataError("BlockState: assignment size mismatch");
    matrix_.assign(std::size_t{blocks_} * blocks_, 0);
    block_out_.assign(blocks_, 0);
    block_in_.assign(blocks_, 0);
    sizes_.assign(blocks_, 0);
    scratch_out_.assign(blocks_, 0);
    scratch_in_.assign(blocks_, 0);
    for (BlockId b : assignment_) {
        if (b >= blocks_)
            throw DataError("BlockState: block id out of range");
        ++sizes_[b];
    }
    for (const Edge& ed : graph.edges()) {
        const BlockId r = assignment_[ed.src], s = assignment_[ed.dst];
        e(r, s) += ed.weight;
        block_out_[r] += ed.weight;
        block_in_[s] += ed.weight;
    }
}

void BlockState::node_block_counts(NodeIndex v, std::vector<std::uint64_t>& out_to,
                                   std::vector<std::uint64_t>& in_from) const {
    std::fill(out_to.begin(), out_to.end(), 0);
    std::fill(in_from.begin(), in_from.end(), 0);
    const auto& edges = graph_->edges();
    for (std::uint32_t i : graph_->out_edges(v))
        out_to[assignment_[edges[i].dst]] += edges[i].weight;
    for (std::uint32_t i : graph_->in_edges(v))
        in_from[assignment_[edges[i].src]] += edges[i].weight;
}

void BlockState::neighbour_block_weights(NodeIndex v, std::vector<double>& out) const {
    out.assign(blocks_, 0.0);
    const auto& edges = graph_->edges();
    for (std::uint32_t i : graph_->out_edges(v))
        out[assignment_[edges[i].dst]] += u(edges[i].weight);
    for (std::uint32_t i : graph_->in_edges(v))
        out[assignment_[edges[i].src]] += u(edges[i].weight);
}

double BlockState::move_delta(NodeIndex v, BlockId s) const {
    const BlockId r = assignment_[v];
    if (r == s)
        return 0.0;
    node_block_counts(v, scratch_out_, scratch_in_);
    const auto& out_to = scratch_out_;
    const auto& in_from = scratch_in_;

    auto cell_change = [&](BlockId x, BlockId y) {
        std::int64_t d = 0;
        if (x == r)
            d -= static_cast<std::int64_t>(out_to[y]);
        if (x == s)
            d += static_cast<std::int64_t>(out_to[y]);
        if (y == r)
            d -= static_cast<std::int64_t>(in_from[x]);
        if (y == s)
            d += static_cast<std::int64_t>(in_from[x]);
        if (d == 0)
            return 0.0;
        const std::uint64_t old = e(x, y);
        const auto now = static_cast<std::uint64_t>(static_cast<std::int64_t>(old) + d);
        return lfact(u(now)) - lfact(u(old));
    };

    double d_cells = 0.0;
    for (BlockId t = 0; t < blocks_; ++t) {
        d_cells += cell_change(r, t) + cell_change(s, t);
        if (t != r && t != s)
            d_cells += cell_change(t, r) + cell_change(t, s);
    }

    const double kout = u(graph_->out_strength(v));
    const double kin = u(graph_->in_strength(v));
    const double bo_r = u(block_out_[r]), bo_s = u(block_out_[s]);
    const double bi_r = u(block_in_[r]), bi_s = u(block_in_[s]);
    const double n_r = u(sizes_[r]), n_s = u(sizes_[s]);

    double delta = 0.0;
    delta += lfact(bo_r - kout) + lfact(bo_s + kout) - lfact(bo_r) - lfact(bo_s);
    delta += lfact(bi_r - kin) + lfact(bi_s + kin) - lfact(bi_r) - lfact(bi_s);
    delta -= d_cells;
    delta += lmultiset(n_r - 1, bo_r - kout) + lmultiset(n_r - 1, bi_r - kin) + lmultiset(n_s + 1, bo_s + kout) +
             lmultiset(n_s + 1, bi_s + kin);
    delta -= lmultiset(n_r, bo_r) + lmultiset(n_r, bi_r) + lmultiset(n_s, bo_s) + lmultiset(n_s, bi_s);
    delta += lfact(n_r) + lfact(n_s) - lfact(n_r - 1) - lfact(n_s + 1);
    return delta;
}

void BlockState::move(NodeIndex v, BlockId s) {
    const BlockId r = assignment_[v];
    if (r == s)
        return;
    const auto& edges = graph_->edges();
    for (std::uint32_t i : graph_->out_edges(v)) {
        const BlockId t = assignment_[edges[i].dst];
        e(r, t) -= edges[i].weight;
        e(s, t) += edges[i].weight;
    }
    for (std::uint32_t i : graph_->in_edges(v)) {
        const BlockId t = assignment_[edges[i].src];
        e(t, r) -= edges[i].weight;
        e(t, s) += edges[i].weight;
    }
    block_out_[r] -= graph_->out_strength(v);
    block_out_[s] += graph_->out_strength(v);
    block_in_[r] -= graph_->in_strength(v);
    block_in_[s] += graph_->in_strength(v);
    --sizes_[r];
    ++sizes_[s];
    assignment_[v] = s;
}

double BlockState::entropy() const {
    double S = 0.0;
    for (std::uint64_t c : matrix_)
        if (c)
            S -= lfact(u(c));
    for (BlockId r = 0; r < blocks_; ++r) {
        S += lfact(u(block_out_[r])) + lfact(u(block_in_[r]));
        S += lmultiset(u(sizes_[r]), u(block_out_[r])) + lmultiset(u(sizes_[r]), u(block_in_[r]));
    }
    S += constant_terms(*graph_);
    S += lmultiset(u(blocks_) * u(blocks_), u(graph_->total_weight()));
    S += partition_prior(graph_->node_count(), blocks_, sizes_);
    return S;
}

// ---------------------------------------------------------------------------
// Agglomerative initialisation

namespace {

using Sparse = std::vector<std::pair<BlockId, std::uint64_t>>;

struct BlockGraph {
    std::size_t count = 0;
    std::vector<Sparse> rows, cols;
    std::vector<std::uint64_t> out, in, sizes;
};

BlockGraph block_graph(const InteractionGraph& g, const std::vector<BlockId>& b, std::size_t count) {
    BlockGraph bg;
    bg.count = count;
    bg.rows.assign(count, {});
    bg.cols.assign(count, {});
    bg.out.assign(count, 0);
    bg.in.assign(count, 0);
    bg.sizes.assign(count, 0);
    for (BlockId x : b)
        ++bg.sizes[x];

    std::vector<std::tuple<BlockId, BlockId, std::uint64_t>> cells;
    cells.reserve(g.edge_count());
    for (const Edge& e : g.edges())
        cells.emplace_back(b[e.src], b[e.dst], e.weight);
    std::sort(cells.begin(), cells.end());
    for (std::size_t i = 0; i < cells.size();) {
        auto [r, s, w] = cells[i];
        std::size_t j = i + 1;
        for (; j < cells.size() && std::get<0>(cells[j]) == r && std::get<1>(cells[j]) == s; ++j)
            w += std::get<2>(cells[j]);
        bg.rows[r].emplace_back(s, w);
        bg.cols[s].emplace_back(r, w);
        bg.out[r] += w;
        bg.in[s] += w;
        i = j;
    }
    return bg;
}

struct MergeCandidate {
    double delta;
    BlockId r, s;

    bool operator<(const MergeCandidate& o) const { return std::tie(delta, r, s) < std::tie(o.delta, o.r, o.s); }
};

class MergeEvaluator {
public:
    explicit MergeEvaluator(const BlockGraph& bg) : bg_(bg), acc_(bg.count, 0) {}

    // Change in the pair-dependent part of the description length when r and
    // s become one block. Terms depending only on the block count are equal
    // for every candidate of a round and are left out.
    double delta(BlockId r, BlockId s) {
        double old_cells = 0.0, new_cells = 0.0;
        std::uint64_t diag = 0;

        auto fold = [&](const Sparse& line, bool is_row) {
            for (auto [t, c] : line) {
                if (t == r || t == s) {
                    if (is_row)
                        diag += c, old_cells += lfact(u(c));
                    continue;
                }
                old_cells += lfact(u(c));
                if (acc_[t] == 0)
                    touched_.push_back(t);
                acc_[t] += c;
            }
        };
        auto flush = [&] {
            for (BlockId t : touched_) {
                new_cells += lfact(u(acc_[t]));
                acc_[t] = 0;
            }
            touched_.clear();
        };
        fold(bg_.rows[r], true);
        fold(bg_.rows[s], true);
        flush();
        fold(bg_.cols[r], false);
        fold(bg_.cols[s], false);
        flush();
        new_cells += lfact(u(diag));

        const double bo_r = u(bg_.out[r]), bo_s = u(bg_.out[s]);
        const double bi_r = u(bg_.in[r]), bi_s = u(bg_.in[s]);
        const double n_r = u(bg_.sizes[r]), n_s = u(bg_.sizes[s]);

        double d = 0.0;
        d += lfact(bo_r + bo_s) - lfact(bo_r) - lfact(bo_s);
        d += lfact(bi_r + bi_s) - lfact(bi_r) - lfact(bi_s);
        d -= new_cells - old_cells;
        d += lmultiset(n_r + n_s, bo_r + bo_s) + lmultiset(n_r + n_s, bi_r + bi_s);
        d -= lmultiset(n_r, bo_r) + lmultiset(n_r, bi_r) + lmultiset(n_s, bo_s) + lmultiset(n_s, bi_s);
        d += lfact(n_r) + lfact(n_s) - lfact(n_r + n_s);
        return d;
    }

private:
    const BlockGraph& bg_;
    std::vector<std::uint64_t> acc_;
    std::vector<BlockId> touched_;
};

} // namespace

std::vector<BlockId> agglomerative_init(const InteractionGraph& graph, BlockId blocks, double merge_fraction) {
    const std::size_t n = graph.node_count();
    if (blocks == 0 || blocks > n)
        throw DataError("agglomerative_init: need 1 <= B <= node count");
    if (!(merge_fraction > 0.0 && merge_fraction <= 1.0))
        throw ConfigError("merge_fraction must be in (0, 1]");

    std::vector<BlockId> b(n);
    std::iota(b.begin(), b.end(), BlockId{0});
    std::size_t count = n;

    while (count > blocks) {
        const BlockGraph bg = block_graph(graph, b, count);
        MergeEvaluator eval(bg);
        std::vector<MergeCandidate> cands;
        std::vector<BlockId> mark(count, static_cast<BlockId>(-1));
        for (BlockId r = 0; r < count; ++r) {
            auto consider = [&](const Sparse& line) {
                for (auto [s, c] : line) {
                    if (s <= r || mark[s] == r)
                        continue;
                    mark[s] = r;
                    cands.push_back({eval.delta(r, s), r, s});
                }
            };
            consider(bg.rows[r]);
            consider(bg.cols[r]);
        }
        if (cands.empty()) {
            // Only disconnected blocks remain.
            for (BlockId r = 0; r < count; ++r)
                for (BlockId s = r + 1; s < count; ++s)
                    cands.push_back({eval.delta(r, s), r, s});
        }
        std::sort(cands.begin(), cands.end());

        const auto wanted = std::max<std::size_t>(
            1, std::min<std::size_t>(count - blocks,
                                     static_cast<std::size_t>(std::floor(u(count) * merge_fraction))));
        std::vector<BlockId> parent(count);
        std::iota(parent.begin(), parent.end(), BlockId{0});
        std::vector<bool> used(count, false);
        std::size_t merged = 0;
        for (const auto& c : cands) {
            if (merged == wanted)
                break;
            if (used[c.r] || used[c.s])
                continue;
            used[c.r] = used[c.s] = true;
            parent[c.s] = c.r;
            ++merged;
        }

        // Renumber by smallest member node so block order tracks node order.
        std::vector<BlockId> renumber(count, static_cast<BlockId>(-1));
        BlockId next = 0;
        for (NodeIndex v = 0; v < n; ++v) {
            const BlockId root = parent[b[v]];
            if (renumber[root] == static_cast<BlockId>(-1))
                renumber[root] = next++;
            b[v] = renumber[root];
        }
        count = next;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Inference

namespace {

struct ChainResult {
    std::vector<BlockId> assignment;
    double description_length = 0.0;
    std::size_t sweeps = 0;
};

std::vector<BlockId> random_init(std::size_t n, BlockId blocks, std::mt19937_64& rng) {
    std::vector<NodeIndex> order(n);
    std::iota(order.begin(), order.end(), NodeIndex{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<BlockId> b(n);
    std::uniform_int_distribution<BlockId> pick(0, blocks - 1);
    for (std::size_t i = 0; i < n; ++i)
        b[order[i]] = i < blocks ? static_cast<BlockId>(i) : pick(rng);
    return b;
}

ChainResult run_chain(const InteractionGraph& g, BlockId blocks, const McmcConfig& cfg,
                      const std::vector<BlockId>* shared_init, std::size_t chain) {
    std::mt19937_64 rng(cfg.seed + chain);
    std::vector<BlockId> init = shared_init ? *shared_init : random_init(g.node_count(), blocks, rng);
    BlockState state(g, std::move(init), blocks);

    ChainResult res;
    double current = state.entropy();
    double best = current;
    res.assignment = state.assignment();
    if (blocks == 1) {
        res.description_length = best;
        return res;
    }

    const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : 1.0 / blocks;
    std::vector<NodeIndex> order(g.node_count());
    std::iota(order.begin(), order.end(), NodeIndex{0});
    std::vector<double> weights;
    std::vector<double> best_history;
    best_history.reserve(cfg.sweeps);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        for (NodeIndex v : order) {
            const BlockId r = state.block_of(v);
            state.neighbour_block_weights(v, weights);
            double total = 0.0;
            for (double& w : weights)
                total += (w += eps);
            double x = unit(rng) * total;
            BlockId s = 0;
            while (s + 1 < blocks && x >= weights[s])
                x -= weights[s++];
            if (s == r || state.block_size(r) == 1)
                continue;
            const double delta = state.move_delta(v, s);
            const double log_accept = -cfg.beta * delta + std::log(weights[r] / weights[s]);
            if (log_accept >= 0.0 || unit(rng) < std::exp(log_accept)) {
                state.move(v, s);
                current += delta;
            }
        }
        res.sweeps = sweep + 1;
        if (current < best) {
            best = current;
            res.assignment = state.assignment();
        }
        best_history.push_back(best);
        const std::size_t w = cfg.early_stop_window;
        if (w > 0 && best_history.size() > w &&
            best_history[best_history.size() - 1 - w] - best < cfg.early_stop_tol)
            break;
    }
    res.description_length = description_length(g, res.assignment, blocks);
    return res;
}

} // namespace

Partition infer_partition(const InteractionGraph& graph, BlockId blocks, const McmcConfig& cfg) {
    if (blocks == 0)
        throw ConfigError("number of blocks must be at least 1");
    if (cfg.sweeps == 0)
        throw ConfigError("MCMC sweep count must be positive");
    if (cfg.chains == 0)
        throw ConfigError("MCMC chain count must be positive");
    if (graph.empty())
        throw DataError("cannot infer communities of an empty graph");
    if (blocks > graph.node_count())
        throw DataError("B=" + std::to_string(blocks) + " exceeds node count " + std::to_string(graph.node_count()));

    // Canonical node order: sorted by user id.
    const std::size_t n = graph.node_count();
    std::vector<NodeIndex> canon_to_orig(n);
    std::iota(canon_to_orig.begin(), canon_to_orig.end(), NodeIndex{0});
    std::sort(canon_to_orig.begin(), canon_to_orig.end(),
              [&graph](NodeIndex a, NodeIndex b) { return graph.user(a) < graph.user(b); });
    std::vector<NodeIndex> orig_to_canon(n);
    for (NodeIndex c = 0; c < n; ++c)
        orig_to_canon[canon_to_orig[c]] = c;
    std::vector<UserId> users;
    std::vector<std::string> handles;
    for (NodeIndex o : canon_to_orig) {
        users.push_back(graph.user(o));
        handles.push_back(graph.handle(o));
    }
    std::vector<Edge> edges;
    for (const Edge& e : graph.edges())
        edges.push_back({orig_to_canon[e.src], orig_to_canon[e.dst], e.weight});
    const InteractionGraph canon(graph.window(), std::move(users), std::move(handles), std::move(edges));

    std::vector<BlockId> shared;
    if (cfg.init == InitMode::agglomerative)
        shared = agglomerative_init(canon, blocks, cfg.merge_fraction);
    const std::vector<BlockId>* init = cfg.init == InitMode::agglomerative ? &shared : nullptr;

    std::vector<ChainResult> results(cfg.chains);
    if (cfg.parallel && cfg.chains > 1) {
        std::vector<std::jthread> workers;
        for (std::size_t c = 0; c < cfg.chains; ++c)
            workers.emplace_back([&, c] { results[c] = run_chain(canon, blocks, cfg, init, c); });
    } else {
        for (std::size_t c = 0; c < cfg.chains; ++c)
            results[c] = run_chain(canon, blocks, cfg, init, c);
    }

    std::size_t winner = 0;
    for (std::size_t c = 1; c < results.size(); ++c)
        if (results[c].description_length < results[winner].description_length)
            winner = c;
    const auto& best = results[winner];

    std::vector<BlockId> relabel(blocks, static_cast<BlockId>(-1));
    BlockId next = 0;
    for (NodeIndex c = 0; c < n; ++c)
        if (relabel[best.assignment[c]] == static_cast<BlockId>(-1))
            relabel[best.assignment[c]] = next++;

    Partition p;
    p.blocks = blocks;
    p.assignment.resize(n);
    for (NodeIndex c = 0; c < n; ++c)
        p.assignment[canon_to_orig[c]] = relabel[best.assignment[c]];
    p.description_length = description_length(graph, p.assignment, blocks);
    p.seed = cfg.seed;
    p.sweeps = best.sweeps;
    p.chain = winner;
    return p;
}

} // namespace polarshift
