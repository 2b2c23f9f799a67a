#pragma once

#include <map>
#include <string>
#include <vector>

#include "polarshift/communities.hpp"

namespace polarshift {

struct ShiftRecord {
    UserId user;
    std::string label_t1;
    std::string label_t2;
    bool is_shifter = false;

    bool operator==(const ShiftRecord&) const = default;
};

struct ShiftResult {
    std::vector<ShiftRecord> records; ///< users present in both windows, by user id
    std::size_t only_t1 = 0;
    std::size_t only_t2 = 0;

    std::size_t shifters() const;
    std::size_t stayers() const { return records.size() - shifters(); }
};

/// Block correspondence between two windows.
struct Alignment {
    std::map<BlockId, BlockId> t1_to_t2;
    std::map<BlockId, double> jaccard; ///< keyed by t1 block
    bool anchor_consistent = true;
    std::vector<std::string> warnings;
};

/// Greedy maximum-Jaccard matching over all users of each block (ties to
/// the lowest block pair). Warns when the anchor labels of matched blocks
/// disagree. Throws DataError if a labeled block has no members.
Alignment align(const CommunitySnapshot& t1, const CommunitySnapshot& t2);

/// is_shifter <=> label at t1 differs from label at t2. Users seen in only
/// one window are counted, not recorded.
ShiftResult detect_shifters(const CommunitySnapshot& t1, const CommunitySnapshot& t2);

struct LabelOverlap {
    std::size_t size_t1 = 0, size_t2 = 0;
    double pct_t1 = 0.0, pct_t2 = 0.0;
    /// Over users present in both windows.
    double jaccard_restricted = 0.0;
    /// Over all users of either window.
    double jaccard_raw = 0.0;
};

struct OverlapReport {
    std::map<std::string, LabelOverlap> labels;
    std::size_t users_t1 = 0, users_t2 = 0, users_both = 0;
};

OverlapReport overlap_report(const CommunitySnapshot& t1, const CommunitySnapshot& t2);

void write_shift_csv(const ShiftResult& result, const std::string& path);
ShiftResult read_shift_csv(const std::string& path);

} // namespace polarshift
