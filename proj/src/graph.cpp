#include "polarshift/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "polarshift/csv.hpp"

namespace polarshift {

InteractionGraph::InteractionGraph(std::string window, std::vector<UserId> users, std::vector<std::string> handles,
                                   std::vector<Edge> edges)
    : window_(std::move(window)), users_(std::move(users)), handles_(std::move(handles)), edges_(std::move(edges)) {
    const std::size_t n = users_.size();
    if (handles_.size() != n)
        throw DataError("graph: handle table size does not match node count");
    for (NodeIndex v = 0; v < n; ++v)
        if (!index_.emplace(users_[v], v).second)
            throw DataError("graph: duplicate user '" + users_[v].value + "'");

    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.src >= n || e.dst >= n)
            throw DataError("graph: edge endpoint out of range");
        if (e.src == e.dst)
            throw DataError("graph: self-loop on '" + users_[e.src].value + "'");
        if (e.weight == 0)
            throw DataError("graph: zero-weight edge");
        if (i > 0 && edges_[i - 1].src == e.src && edges_[i - 1].dst == e.dst)
            throw DataError("graph: duplicate edge " + users_[e.src].value + "->" + users_[e.dst].value);
    }

    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    out_strength_.assign(n, 0);
    in_strength_.assign(n, 0);
    for (const Edge& e : edges_) {
        ++out_offsets_[e.src + 1];
        ++in_offsets_[e.dst + 1];
        out_strength_[e.src] += e.weight;
        in_strength_[e.dst] += e.weight;
        total_weight_ += e.weight;
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
    out_list_.resize(edges_.size());
    in_list_.resize(edges_.size());
    std::vector<std::uint32_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::uint32_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
        out_list_[out_fill[edges_[i].src]++] = i;
        in_list_[in_fill[edges_[i].dst]++] = i;
    }
}

std::optional<NodeIndex> InteractionGraph::find(const UserId& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<NodeIndex> InteractionGraph::find_handle(const std::string& handle) const {
    for (NodeIndex v = 0; v < handles_.size(); ++v)
        if (handles_[v] == handle)
            return v;
    return std::nullopt;
}

std::span<const std::uint32_t> InteractionGraph::out_edges(NodeIndex v) const {
    return {out_list_.data() + out_offsets_[v], out_list_.data() + out_offsets_[v + 1]};
}

std::span<const std::uint32_t> InteractionGraph::in_edges(NodeIndex v) const {
    return {in_list_.data() + in_offsets_[v], in_list_.data() + in_offsets_[v + 1]};
}

bool InteractionGraph::operator==(const InteractionGraph& other) const {
    return window_ == other.window_ && users_ == other.users_ && handles_ == other.handles_ && edges_ == other.edges_;
}

InteractionGraph build_graph(std::span<const TweetRecord> records, const std::string& window) {
    struct HandleObs {
        std::int64_t timestamp;
        std::string handle;
    };
    std::unordered_map<UserId, HandleObs> latest;
    auto observe = [&latest](const UserId& id, const std::string& handle, std::int64_t ts) {
        auto [it, inserted] = latest.try_emplace(id, HandleObs{ts, handle});
        if (!inserted && ts >= it->second.timestamp)
            it->second = HandleObs{ts, handle};
    };

    std::vector<UserId> users;
    std::unordered_map<UserId, NodeIndex> index;
    auto intern = [&](const UserId& id) {
        auto [it, inserted] = index.try_emplace(id, static_cast<NodeIndex>(users.size()));
        if (inserted)
            users.push_back(id);
        return it->second;
    };

    std::map<std::pair<NodeIndex, NodeIndex>, std::uint64_t> folded;
    for (const auto& r : records) {
        observe(r.author_id, r.author_handle, r.timestamp);
        if (!r.retweeted_author_id || *r.retweeted_author_id == r.author_id)
            continue;
        if (r.retweeted_author_handle)
            observe(*r.retweeted_author_id, *r.retweeted_author_handle, r.timestamp);
        NodeIndex creator = intern(*r.retweeted_author_id);
        NodeIndex retweeter = intern(r.author_id);
        ++folded[{creator, retweeter}];
    }

    std::vector<std::string> handles;
    handles.reserve(users.size());
    for (const auto& u : users) {
        auto it = latest.find(u);
        handles.push_back(it == latest.end() ? std::string{} : it->second.handle);
    }
    std::vector<Edge> edges;
    edges.reserve(folded.size());
    for (const auto& [key, w] : folded)
        edges.push_back({key.first, key.second, w});
    return InteractionGraph(window, std::move(users), std::move(handles), std::move(edges));
}

InteractionGraph filter_by_activity(const InteractionGraph& graph, std::uint64_t threshold) {
    const std::size_t n = graph.node_count();
    std::vector<NodeIndex> remap(n, static_cast<NodeIndex>(-1));
    std::vector<UserId> users;
    std::vector<std::string> handles;
    for (NodeIndex v = 0; v < n; ++v) {
        if (graph.in_strength(v) > threshold || graph.out_strength(v) > threshold) {
            remap[v] = static_cast<NodeIndex>(users.size());
            users.push_back(graph.user(v));
            handles.push_back(graph.handle(v));
        }
    }
    std::vector<Edge> edges;
    for (const Edge& e : graph.edges()) {
        if (remap[e.src] != static_cast<NodeIndex>(-1) && remap[e.dst] != static_cast<NodeIndex>(-1))
            edges.push_back({remap[e.src], remap[e.dst], e.weight});
    }
    return InteractionGraph(graph.window(), std::move(users), std::move(handles), std::move(edges));
}

void export_edgelist(const InteractionGraph& graph, const std::string& path) {
    std::vector<const Edge*> order;
    order.reserve(graph.edge_count());
    for (const Edge& e : graph.edges())
        order.push_back(&e);
    std::sort(order.begin(), order.end(), [&graph](const Edge* a, const Edge* b) {
        return std::tie(graph.user(a->src), graph.user(a->dst)) < std::tie(graph.user(b->src), graph.user(b->dst));
    });
    std::vector<csv::Row> rows;
    rows.reserve(order.size());
    for (const Edge* e : order)
        rows.push_back({graph.user(e->src).value, graph.user(e->dst).value, std::to_string(e->weight)});
    csv::write(path, {"src", "dst", "weight"}, rows);
}

void export_node_table(const InteractionGraph& graph, const std::string& path) {
    std::vector<csv::Row> rows;
    rows.reserve(graph.node_count());
    for (NodeIndex v = 0; v < graph.node_count(); ++v)
        rows.push_back({graph.user(v).value, graph.handle(v), std::to_string(graph.in_strength(v)),
                        std::to_string(graph.out_strength(v))});
    csv::write(path, {"user_id", "handle", "in_count", "out_count"}, rows);
}

InteractionGraph import_graph(const std::string& edges_path, const std::string& nodes_path,
                              const std::string& window) {
    const csv::Table nodes = csv::read(nodes_path);
    const std::size_t c_user = nodes.column("user_id");
    const std::size_t c_handle = nodes.column("handle");
    std::vector<UserId> users;
    std::vector<std::string> handles;
    std::unordered_map<std::string, NodeIndex> index;
    for (const auto& row : nodes.rows) {
        index.emplace(row[c_user], static_cast<NodeIndex>(users.size()));
        users.emplace_back(row[c_user]);
        handles.push_back(row[c_handle]);
    }

    const csv::Table table = csv::read(edges_path);
    const std::size_t c_src = table.column("src");
    const std::size_t c_dst = table.column("dst");
    const std::size_t c_w = table.column("weight");
    std::vector<Edge> edges;
    edges.reserve(table.rows.size());
    auto lookup = [&](const std::string& id) {
        auto it = index.find(id);
        if (it == index.end())
            throw DataError(edges_path + ": edge endpoint '" + id + "' not in node table " + nodes_path);
        return it->second;
    };
    for (const auto& row : table.rows) {
        long long w = csv::parse_int(row[c_w], "edge weight");
        if (w <= 0)
            throw DataError(edges_path + ": non-positive edge weight");
        edges.push_back({lookup(row[c_src]), lookup(row[c_dst]), static_cast<std::uint64_t>(w)});
    }
    return InteractionGraph(window, std::move(users), std::move(handles), std::move(edges));
}

} // namespace polarshift
