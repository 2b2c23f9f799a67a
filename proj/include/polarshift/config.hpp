#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "polarshift/communities.hpp"
#include "polarshift/ingest.hpp"
#include "polarshift/metrics.hpp"
#include "polarshift/report.hpp"
#include "polarshift/sbm.hpp"
#include "polarshift/sentiment.hpp"
#include "polarshift/stats.hpp"

namespace polarshift {

/// Everything a run needs. Paths are absolute after loading (relative
/// entries resolve against the config file's directory).
struct RunConfig {
    std::vector<TimeWindow> windows; ///< exactly two, t1 then t2
    std::string input;               ///< tweet records (JSONL); may be empty
    bool strict_ingest = false;
    std::uint64_t activity_threshold = 5;
    BlockId blocks = 2;
    McmcConfig sbm;
    PageRankOptions pagerank;
    StatsConfig stats;
    std::string lexicon; ///< empty means the bundled lexicon
    bool originals_only = false;
    SentimentRules rules;
    AnchorMap anchors;
    PolarityMap polarity;
    std::size_t histogram_bins = 20;
    std::uint64_t seed = 42;

    const TimeWindow& t1() const { return windows.at(0); }
    const TimeWindow& t2() const { return windows.at(1); }
};

/// Defaults: the four anchor accounts and republican -> positive,
/// democratic -> negative. No windows.
RunConfig default_config();

/// Unknown keys and wrong types are ConfigError. base_dir anchors relative
/// paths.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir);
RunConfig load_config(const std::string& path);

/// Inverse of parse_config (paths written as stored).
nlohmann::json config_to_json(const RunConfig& cfg);

/// Throws ConfigError on an unusable configuration.
void validate_config(const RunConfig& cfg);

/// Bundled lexicon location.
std::string default_lexicon_path();

SentimentLexicon load_lexicon(const RunConfig& cfg);

} // namespace polarshift
