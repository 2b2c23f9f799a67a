#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polarshift/graph.hpp"
#include "polarshift/sbm.hpp"

namespace polarshift {

inline constexpr const char* kUnlabeled = "unlabeled";

/// Raised when anchor accounts do not single out one block per label.
class AmbiguousAnchors : public DataError {
public:
    using DataError::DataError;
};

struct AnchorEvidence {
    std::string handle;
    std::string label;
    std::optional<UserId> user;   ///< unset when the handle is not in the graph
    std::optional<BlockId> block;
};

struct CommunityLabels {
    std::map<BlockId, std::string> labels;
    std::vector<AnchorEvidence> evidence;

    const std::string& label_of(BlockId b) const;
};

/// Anchor handle -> community label, e.g. "JoeBiden" -> "democratic".
using AnchorMap = std::map<std::string, std::string>;

/// Each label goes to the block holding the strict majority of its present
/// anchors. Ties, or two labels claiming one block, raise AmbiguousAnchors.
/// Absent anchors are recorded in the evidence; a label with no anchor in
/// the graph is a DataError. Blocks no label claims stay kUnlabeled.
CommunityLabels label_communities(const Partition& partition, const InteractionGraph& graph,
                                  const AnchorMap& anchors);

/// Community membership of one window, keyed by user.
struct CommunitySnapshot {
    std::string window;
    std::map<UserId, BlockId> block;
    std::map<BlockId, std::string> labels;

    const std::string& label_of(const UserId& user) const;
    std::size_t size() const noexcept { return block.size(); }
};

CommunitySnapshot make_snapshot(const InteractionGraph& graph, const Partition& partition,
                                const CommunityLabels& labels);

/// `user_id,block,label`, rows sorted by user id.
void write_partition_csv(const CommunitySnapshot& snapshot, const std::string& path);
CommunitySnapshot read_partition_csv(const std::string& path, const std::string& window);

} // namespace polarshift
