#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polarshift/config.hpp"
#include "polarshift/ingest.hpp"
#include "polarshift/sentiment.hpp"

namespace polarshift {

/// Two-window retweet fixture with planted communities and movers.
struct SynthOptions {
    std::size_t users = 500;
    std::size_t movers = 25;
    double majority_fraction = 0.64; ///< share of the republican community
    double cross_fraction = 0.03;    ///< retweets aimed at the other community
    double mover_drift = -0.1;       ///< added to every mover tweet in t2
    std::size_t originals = 6;       ///< original tweets per user per window
    std::size_t retweets_min = 18, retweets_max = 30;
    /// Movers make this many times fewer retweets and are this many times
    /// less likely to be retweeted.
    double mover_connectivity_ratio = 3.0;
    int noise_thousandths = 20; ///< per-tweet tone jitter, uniform +-
    std::uint64_t seed = 42;
};

struct SynthTruth {
    UserId user;
    std::string handle;
    std::string community_t1, community_t2;
    bool is_mover = false;
    double base_sentiment = 0.0;
};

struct SynthDataset {
    std::vector<TweetRecord> records;
    SentimentLexicon lexicon;
    RunConfig config; ///< lexicon/input left relative: "lexicon.tsv", "records.jsonl"
    std::vector<SynthTruth> truth;
};

/// Lexicon token whose compound score is exactly thousandths / 1000.
std::string tone_token(int thousandths);
double tone_valence(int thousandths, double alpha = 15.0);

SynthDataset make_synthetic(const SynthOptions& opts);

/// records.jsonl, lexicon.tsv, config.json and truth.csv under dir.
void write_synthetic(const SynthDataset& data, const std::string& dir);

std::vector<SynthTruth> read_truth_csv(const std::string& path);

} // namespace polarshift
