#include "polarshift/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "polarshift/csv.hpp"

namespace polarshift {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool is_all_caps(std::string_view s) {
    std::size_t letters = 0;
    for (char c : s) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalpha(uc)) {
            if (!std::isupper(uc))
                return false;
            ++letters;
        }
    }
    return letters >= 2;
}

bool is_negation(const Token& t, const SentimentLexicon& lex) {
    if (lex.is_negation(t.key))
        return true;
    return t.key.size() > 3 && t.key.ends_with("n't");
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' '))
        s.pop_back();
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// Lexicon

void SentimentLexicon::check_unique(const std::string& term) const {
    if (term.empty())
        throw DataError("lexicon: empty term");
    if (valence_.contains(term) || booster_.contains(term) || negation_.contains(term))
        throw DataError("lexicon: term '" + term + "' appears more than once");
}

void SentimentLexicon::add_valence(std::string term, double valence) {
    term = lower(term);
    check_unique(term);
    valence_.emplace(std::move(term), valence);
}

void SentimentLexicon::add_booster(std::string term, double delta) {
    term = lower(term);
    check_unique(term);
    booster_.emplace(std::move(term), delta);
}

void SentimentLexicon::add_negation(std::string term) {
    term = lower(term);
    check_unique(term);
    negation_.insert(std::move(term));
}

std::optional<double> SentimentLexicon::valence(std::string_view term) const {
    auto it = valence_.find(term);
    return it == valence_.end() ? std::nullopt : std::optional<double>(it->second);
}

std::optional<double> SentimentLexicon::booster(std::string_view term) const {
    auto it = booster_.find(term);
    return it == booster_.end() ? std::nullopt : std::optional<double>(it->second);
}

bool SentimentLexicon::is_negation(std::string_view term) const { return negation_.find(term) != negation_.end(); }

SentimentLexicon SentimentLexicon::mirrored() const {
    SentimentLexicon m = *this;
    for (auto& [term, v] : m.valence_)
        v = -v;
    return m;
}

SentimentLexicon SentimentLexicon::load(std::istream& in) {
    enum class Section { valence, booster, negation } section = Section::valence;
    SentimentLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&line_no](const std::string& why) {
        throw DataError("lexicon line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (line == "#valence")
                section = Section::valence;
            else if (line == "#booster")
                section = Section::booster;
            else if (line == "#negation")
                section = Section::negation;
            continue;
        }
        try {
            if (section == Section::negation) {
                lex.add_negation(line);
                continue;
            }
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                fail("expected term<TAB>value");
            const std::string term = line.substr(0, tab);
            const std::string value = line.substr(tab + 1);
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(value, &used);
            } catch (const std::exception&) {
                fail("invalid number '" + value + "'");
            }
            if (used != value.size() || !std::isfinite(v))
                fail("invalid number '" + value + "'");
            if (section == Section::valence)
                lex.add_valence(term, v);
            else
                lex.add_booster(term, v);
        } catch (const DataError& e) {
            if (std::string_view(e.what()).starts_with("lexicon line"))
                throw;
            fail(e.what());
        }
    }
    return lex;
}

SentimentLexicon SentimentLexicon::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open lexicon '" + path + "'");
    try {
        return load(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void SentimentLexicon::save(std::ostream& out) const {
    auto num = [](double v) { return csv::format_double(v); };
    for (const auto& [t, v] : valence_)
        out << t << '\t' << num(v) << '\n';
    out << "#booster\n";
    for (const auto& [t, v] : booster_)
        out << t << '\t' << num(v) << '\n';
    out << "#negation\n";
    for (const auto& t : negation_)
        out << t << '\n';
}

// ---------------------------------------------------------------------------
// Scoring

std::string_view to_string(SentimentClass c) {
    switch (c) {
    case SentimentClass::negative:
        return "negative";
    case SentimentClass::neutral:
        return "neutral";
    case SentimentClass::positive:
        return "positive";
    }
    return "neutral";
}

std::vector<Token> tokenize(std::string_view text, const SentimentLexicon& lexicon) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
            ++j;
        if (j == i)
            break;
        const std::string_view chunk = text.substr(i, j - i);
        i = j;

        std::string key = lower(chunk);
        if (lexicon.valence(key)) {
            out.push_back({std::string(chunk), std::move(key)});
            continue;
        }
        std::size_t a = 0;
        while (a < chunk.size()) {
            while (a < chunk.size() && is_ascii_punct(chunk[a]))
                ++a;
            std::size_t b = a;
            while (b < chunk.size() && (!is_ascii_punct(chunk[b]) || chunk[b] == '\''))
                ++b;
            // Apostrophes only survive inside a word.
            std::size_t e = b;
            while (e > a && chunk[e - 1] == '\'')
                --e;
            if (e > a) {
                const std::string_view word = chunk.substr(a, e - a);
                out.push_back({std::string(word), lower(word)});
            }
            a = b;
        }
    }
    return out;
}

SentimentClass classify(double compound, const SentimentRules& rules) {
    if (compound > rules.positive_threshold)
        return SentimentClass::positive;
    if (compound < rules.negative_threshold)
        return SentimentClass::negative;
    return SentimentClass::neutral;
}

SentimentScore score_text(std::string_view text, const SentimentLexicon& lexicon, const SentimentRules& rules) {
    const std::vector<Token> tokens = tokenize(text, lexicon);
    double sum = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto base = lexicon.valence(tokens[i].key);
        if (!base)
            continue;
        double v = *base;
        if (v == 0.0)
            continue;
        const double dir = sign_of(v);
        if (is_all_caps(tokens[i].text))
            v += dir * rules.caps_increment;
        for (std::size_t d = 1; d <= rules.booster_decay.size() && d <= i; ++d)
            if (auto delta = lexicon.booster(tokens[i - d].key))
                v += dir * *delta * rules.booster_decay[d - 1];
        for (std::size_t d = 1; d <= rules.negation_window && d <= i; ++d) {
            if (is_negation(tokens[i - d], lexicon)) {
                v *= rules.negation_scalar;
                break;
            }
        }
        sum += v;
    }

    if (sum != 0.0) {
        std::size_t bangs = 0;
        std::size_t end = text.size();
        while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1])))
            --end;
        while (end > 0 && text[end - 1] == '!') {
            ++bangs;
            --end;
        }
        bangs = std::min(bangs, rules.exclamation_cap);
        sum += sign_of(sum) * rules.exclamation_increment * static_cast<double>(bangs);
    }

    double compound = sum / std::sqrt(sum * sum + rules.alpha);
    compound = std::clamp(compound, -1.0, 1.0);
    if (!std::isfinite(compound))
        compound = sum > 0 ? 1.0 : (sum < 0 ? -1.0 : 0.0);
    return {compound, classify(compound, rules)};
}

double user_sentiment(std::span<const double> scores) {
    if (scores.empty())
        throw NoTweets("user has no scored tweets");
    double sum = 0.0;
    for (double s : scores)
        sum += s;
    return sum / static_cast<double>(scores.size());
}

std::vector<UserSentiment> aggregate_user_sentiment(std::span<const TweetRecord> records,
                                                    const SentimentLexicon& lexicon, const SentimentRules& rules,
                                                    bool originals_only) {
    std::map<UserId, std::vector<double>> per_user;
    for (const auto& r : records) {
        if (originals_only && r.is_retweet())
            continue;
        per_user[r.author_id].push_back(score_text(r.text, lexicon, rules).compound);
    }
    std::vector<UserSentiment> out;
    out.reserve(per_user.size());
    for (const auto& [user, scores] : per_user) {
        const double mean = user_sentiment(scores);
        out.push_back({user, scores.size(), mean, classify(mean, rules)});
    }
    return out;
}

void write_sentiment_csv(const std::vector<UserSentiment>& rows, const std::string& path) {
    std::vector<csv::Row> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(
            {r.user.value, std::to_string(r.tweets), csv::format_double(r.sentiment), std::string(to_string(r.label))});
    csv::write(path, {"user_id", "tweets", "sentiment", "class"}, out);
}

std::vector<UserSentiment> read_sentiment_csv(const std::string& path, const SentimentRules& rules) {
    const csv::Table t = csv::read(path);
    const std::size_t c_user = t.column("user_id"), c_n = t.column("tweets"), c_s = t.column("sentiment");
    std::vector<UserSentiment> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        const double s = csv::parse_double(r[c_s], "sentiment");
        const auto n = csv::parse_int(r[c_n], "tweets");
        if (n <= 0)
            throw DataError(path + ": user with no tweets");
        out.push_back({UserId(r[c_user]), static_cast<std::size_t>(n), s, classify(s, rules)});
    }
    return out;
}

} // namespace polarshift
