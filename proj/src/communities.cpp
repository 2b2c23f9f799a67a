#include "polarshift/communities.hpp"

#include "polarshift/csv.hpp"

namespace polarshift {

const std::string& CommunityLabels::label_of(BlockId b) const {
    static const std::string unlabeled = kUnlabeled;
    auto it = labels.find(b);
    return it == labels.end() ? unlabeled : it->second;
}

CommunityLabels label_communities(const Partition& partition, const InteractionGraph& graph,
                                  const AnchorMap& anchors) {
    if (partition.assignment.size() != graph.node_count())
        throw DataError("label_communities: partition does not match graph");

    CommunityLabels out;
    // label -> block -> anchor count
    std::map<std::string, std::map<BlockId, std::size_t>> votes;
    for (const auto& [handle, label] : anchors) {
        AnchorEvidence ev{handle, label, std::nullopt, std::nullopt};
        votes[label];
        if (auto v = graph.find_handle(handle)) {
            ev.user = graph.user(*v);
            ev.block = partition.assignment[*v];
            ++votes[label][*ev.block];
        }
        out.evidence.push_back(std::move(ev));
    }

    for (const auto& [label, per_block] : votes) {
        if (per_block.empty())
            throw DataError("no anchor account for label '" + label + "' is present in window '" +
                            graph.window() + "'");
        BlockId best = 0;
        std::size_t best_count = 0;
        bool tie = false;
        for (const auto& [block, count] : per_block) {
            if (count > best_count) {
                best = block;
                best_count = count;
                tie = false;
            } else if (count == best_count) {
                tie = true;
            }
        }
        if (tie)
            throw AmbiguousAnchors("anchors for label '" + label + "' are split evenly across blocks");
        auto [it, inserted] = out.labels.emplace(best, label);
        if (!inserted)
            throw AmbiguousAnchors("labels '" + it->second + "' and '" + label + "' both claim block " +
                                   std::to_string(best));
    }
    return out;
}

const std::string& CommunitySnapshot::label_of(const UserId& user) const {
    static const std::string unlabeled = kUnlabeled;
    auto it = labels.find(block.at(user));
    return it == labels.end() ? unlabeled : it->second;
}

CommunitySnapshot make_snapshot(const InteractionGraph& graph, const Partition& partition,
                                const CommunityLabels& labels) {
    CommunitySnapshot s;
    s.window = graph.window();
    for (NodeIndex v = 0; v < graph.node_count(); ++v)
        s.block.emplace(graph.user(v), partition.assignment.at(v));
    for (BlockId b = 0; b < partition.blocks; ++b)
        s.labels.emplace(b, labels.label_of(b));
    return s;
}

void write_partition_csv(const CommunitySnapshot& snapshot, const std::string& path) {
    std::vector<csv::Row> rows;
    rows.reserve(snapshot.size());
    for (const auto& [user, block] : snapshot.block)
        rows.push_back({user.value, std::to_string(block), snapshot.label_of(user)});
    csv::write(path, {"user_id", "block", "label"}, rows);
}

CommunitySnapshot read_partition_csv(const std::string& path, const std::string& window) {
    const csv::Table t = csv::read(path);
    const std::size_t c_user = t.column("user_id"), c_block = t.column("block"), c_label = t.column("label");
    CommunitySnapshot s;
    s.window = window;
    for (const auto& row : t.rows) {
        const auto b = csv::parse_int(row[c_block], "block");
        if (b < 0)
            throw DataError(path + ": negative block id");
        const auto block = static_cast<BlockId>(b);
        if (!s.block.emplace(UserId(row[c_user]), block).second)
            throw DataError(path + ": duplicate user '" + row[c_user] + "'");
        auto [it, inserted] = s.labels.emplace(block, row[c_label]);
        if (!inserted && it->second != row[c_label])
            throw DataError(path + ": block " + row[c_block] + " carries two labels");
    }
    return s;
}

} // namespace polarshift
