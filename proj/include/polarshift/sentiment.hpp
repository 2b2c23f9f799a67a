#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polarshift/ingest.hpp"
#include "polarshift/types.hpp"

namespace polarshift {

/// Term tables for the rule-based scorer. Keys are lowercase; a term lives
/// in at most one table.
///
/// File format (UTF-8): `term<TAB>valence` lines, then optional `#booster`
/// (`term<TAB>delta`) and `#negation` (`term`) sections. `#valence` switches
/// back to valence entries. Other lines starting with `#` are comments.
class SentimentLexicon {
public:
    void add_valence(std::string term, double valence);
    void add_booster(std::string term, double delta);
    void add_negation(std::string term);

    std::optional<double> valence(std::string_view term) const;
    std::optional<double> booster(std::string_view term) const;
    bool is_negation(std::string_view term) const;

    const std::map<std::string, double, std::less<>>& valences() const noexcept { return valence_; }
    const std::map<std::string, double, std::less<>>& boosters() const noexcept { return booster_; }
    const std::set<std::string, std::less<>>& negations() const noexcept { return negation_; }

    /// Copy with every valence negated; boosters and negations unchanged.
    SentimentLexicon mirrored() const;

    static SentimentLexicon load(std::istream& in);
    static SentimentLexicon load_file(const std::string& path);
    void save(std::ostream& out) const;

    bool operator==(const SentimentLexicon&) const = default;

private:
    void check_unique(const std::string& term) const;

    std::map<std::string, double, std::less<>> valence_;
    std::map<std::string, double, std::less<>> booster_;
    std::set<std::string, std::less<>> negation_;
};

/// Rule constants of the scorer.
struct SentimentRules {
    double negation_scalar = -0.74;
    std::size_t negation_window = 3;
    /// Booster effect by distance 1, 2, 3 before the lexicon token.
    std::array<double, 3> booster_decay{1.0, 0.95, 0.9};
    double caps_increment = 0.733;
    double exclamation_increment = 0.292;
    std::size_t exclamation_cap = 3;
    double alpha = 15.0;
    double positive_threshold = 0.05;
    double negative_threshold = -0.05;
};

enum class SentimentClass { negative, neutral, positive };

std::string_view to_string(SentimentClass c);

struct SentimentScore {
    double compound = 0.0;
    SentimentClass label = SentimentClass::neutral;
};

struct Token {
    std::string text;  ///< as written
    std::string key;   ///< lowercase lookup key
};

/// Whitespace split; a chunk that is itself a lexicon entry (emoticons such
/// as ":)") is kept whole, otherwise it is split on punctuation other than
/// apostrophes.
std::vector<Token> tokenize(std::string_view text, const SentimentLexicon& lexicon);

/// Per lexicon token: ALL-CAPS adds caps_increment to |valence|; each
/// booster among the previous three tokens adds delta * decay in the
/// valence's sign direction; a negation among the previous
/// negation_window tokens multiplies by negation_scalar. Token valences are
/// summed, trailing '!' (up to exclamation_cap) each add
/// exclamation_increment in the sum's sign direction, and the sum s maps to
/// s / sqrt(s^2 + alpha), clamped to [-1, 1].
SentimentScore score_text(std::string_view text, const SentimentLexicon& lexicon, const SentimentRules& rules = {});

/// > positive_threshold positive, < negative_threshold negative, else
/// neutral (the thresholds themselves are neutral).
SentimentClass classify(double compound, const SentimentRules& rules = {});

class NoTweets : public DataError {
public:
    using DataError::DataError;
};

/// Arithmetic mean. Throws NoTweets on empty input.
double user_sentiment(std::span<const double> scores);

struct UserSentiment {
    UserId user;
    std::size_t tweets = 0;
    double sentiment = 0.0;
    SentimentClass label = SentimentClass::neutral;

    bool operator==(const UserSentiment&) const = default;
};

/// Average compound per author over the records, sorted by user id. A
/// retweet's text counts for the retweeter unless originals_only is set.
std::vector<UserSentiment> aggregate_user_sentiment(std::span<const TweetRecord> records,
                                                    const SentimentLexicon& lexicon, const SentimentRules& rules,
                                                    bool originals_only);

void write_sentiment_csv(const std::vector<UserSentiment>& rows, const std::string& path);
std::vector<UserSentiment> read_sentiment_csv(const std::string& path, const SentimentRules& rules = {});

} // namespace polarshift
