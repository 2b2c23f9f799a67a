#include "polarshift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "polarshift/csv.hpp"

namespace polarshift {

std::vector<DegreePair> degrees(const InteractionGraph& graph) {
    std::vector<DegreePair> out(graph.node_count());
    for (NodeIndex v = 0; v < graph.node_count(); ++v)
        out[v] = {graph.in_strength(v), graph.out_strength(v)};
    return out;
}

std::vector<double> pagerank(const InteractionGraph& graph, const PageRankOptions& opts) {
    const std::size_t n = graph.node_count();
    if (n == 0)
        throw DataError("pagerank: empty graph");
    if (!(opts.damping >= 0.0 && opts.damping < 1.0))
        throw ConfigError("pagerank: damping must be in [0, 1)");

    const double nd = static_cast<double>(n);
    std::vector<double> x(n, 1.0 / nd), next(n);
    const auto& edges = graph.edges();
    double residual = 0.0;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        double dangling = 0.0;
        for (NodeIndex v = 0; v < n; ++v)
            if (graph.out_strength(v) == 0)
                dangling += x[v];
        const double base = (1.0 - opts.damping) / nd + opts.damping * dangling / nd;
        std::fill(next.begin(), next.end(), base);
        for (const Edge& e : edges)
            next[e.dst] += opts.damping * x[e.src] * static_cast<double>(e.weight) /
                           static_cast<double>(graph.out_strength(e.src));
        residual = 0.0;
        for (NodeIndex v = 0; v < n; ++v)
            residual += std::abs(next[v] - x[v]);
        x.swap(next);
        if (residual < opts.tol) {
            double sum = 0.0;
            for (double p : x)
                sum += p;
            for (double& p : x)
                p /= sum;
            return x;
        }
    }
    throw ConvergenceError("pagerank did not converge in " + std::to_string(opts.max_iter) +
                               " iterations (L1 residual " + std::to_string(residual) + ")",
                           residual);
}

namespace {

struct BrandesWorkspace {
    std::vector<std::int64_t> dist;
    std::vector<double> sigma, delta;
    std::vector<NodeIndex> order, queue;

    explicit BrandesWorkspace(std::size_t n) : dist(n), sigma(n), delta(n), queue(n) { order.reserve(n); }
};

void accumulate_source(const InteractionGraph& g, NodeIndex s, BrandesWorkspace& w, std::vector<double>& bc) {
    const auto& edges = g.edges();
    std::fill(w.dist.begin(), w.dist.end(), -1);
    std::fill(w.sigma.begin(), w.sigma.end(), 0.0);
    std::fill(w.delta.begin(), w.delta.end(), 0.0);
    w.order.clear();

    w.dist[s] = 0;
    w.sigma[s] = 1.0;
    std::size_t head = 0, tail = 0;
    w.queue[tail++] = s;
    while (head < tail) {
        const NodeIndex v = w.queue[head++];
        w.order.push_back(v);
        for (std::uint32_t i : g.out_edges(v)) {
            const NodeIndex t = edges[i].dst;
            if (w.dist[t] < 0) {
                w.dist[t] = w.dist[v] + 1;
                w.queue[tail++] = t;
            }
            if (w.dist[t] == w.dist[v] + 1)
                w.sigma[t] += w.sigma[v];
        }
    }
    // Dependencies in reverse BFS order; predecessors are recovered from
    // in-edges instead of being stored.
    for (auto it = w.order.rbegin(); it != w.order.rend(); ++it) {
        const NodeIndex v = *it;
        for (std::uint32_t i : g.in_edges(v)) {
            const NodeIndex p = edges[i].src;
            if (w.dist[p] >= 0 && w.dist[p] + 1 == w.dist[v])
                w.delta[p] += w.sigma[p] / w.sigma[v] * (1.0 + w.delta[v]);
        }
        if (v != s)
            bc[v] += w.delta[v];
    }
}

} // namespace

std::vector<double> betweenness(const InteractionGraph& graph, unsigned threads) {
    const std::size_t n = graph.node_count();
    std::vector<double> bc(n, 0.0);
    if (n < 3)
        return bc;

    constexpr std::size_t kChunks = 64;
    const std::size_t chunks = std::min(kChunks, n);
    std::vector<std::vector<double>> partial(chunks, std::vector<double>(n, 0.0));
    auto run_chunk = [&](std::size_t c) {
        BrandesWorkspace w(n);
        for (std::size_t s = c * n / chunks; s < (c + 1) * n / chunks; ++s)
            accumulate_source(graph, static_cast<NodeIndex>(s), w, partial[c]);
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            run_chunk(c);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t c = t; c < chunks; c += threads)
                    run_chunk(c);
            });
    }

    for (const auto& p : partial)
        for (std::size_t v = 0; v < n; ++v)
            bc[v] += p[v];
    const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
    for (double& b : bc)
        b /= norm;
    return bc;
}

std::vector<UserMetrics> compute_metrics(const InteractionGraph& graph, const PageRankOptions& opts) {
    const auto deg = degrees(graph);
    const auto pr = pagerank(graph, opts);
    const auto bc = betweenness(graph);
    std::vector<UserMetrics> out;
    out.reserve(graph.node_count());
    for (NodeIndex v = 0; v < graph.node_count(); ++v)
        out.push_back({graph.user(v), deg[v].in, deg[v].out, pr[v], bc[v]});
    return out;
}

void write_metrics_csv(const std::vector<UserMetrics>& metrics, const std::string& path) {
    std::vector<csv::Row> rows;
    rows.reserve(metrics.size());
    for (const auto& m : metrics)
        rows.push_back({m.user.value, std::to_string(m.in_degree), std::to_string(m.out_degree),
                        csv::format_double(m.pagerank), csv::format_double(m.betweenness)});
    csv::write(path, {"user_id", "in_degree", "out_degree", "pagerank", "betweenness"}, rows);
}

std::vector<UserMetrics> read_metrics_csv(const std::string& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_user = t.column("user_id"), c_in = t.column("in_degree"), c_out = t.column("out_degree"),
                      c_pr = t.column("pagerank"), c_bc = t.column("betweenness");
    std::vector<UserMetrics> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        const auto in = csv::parse_int(r[c_in], "in_degree");
        const auto outd = csv::parse_int(r[c_out], "out_degree");
        if (in < 0 || outd < 0)
            throw DataError(path + ": negative degree");
        out.push_back({UserId(r[c_user]), static_cast<std::uint64_t>(in), static_cast<std::uint64_t>(outd),
                       csv::parse_double(r[c_pr], "pagerank"), csv::parse_double(r[c_bc], "betweenness")});
    }
    return out;
}

} // namespace polarshift
