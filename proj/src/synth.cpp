#include "polarshift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "polarshift/csv.hpp"
#include "polarshift/json_io.hpp"
#include "polarshift/stats.hpp"

namespace polarshift {

namespace {

constexpr std::int64_t kT1Start = 1598918400; // 2020-09-01
constexpr std::int64_t kT2Start = 1601510400; // 2020-10-01
constexpr std::int64_t kT2End = 1604188800;   // 2020-11-01

constexpr const char* kRep = "republican";
constexpr const char* kDem = "democratic";

struct Pending {
    std::int64_t timestamp;
    std::size_t author;
    std::optional<std::size_t> source;
    std::string text;
};

} // namespace

std::string tone_token(int thousandths) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "tone%c%03d", thousandths < 0 ? 'm' : 'p', std::abs(thousandths));
    return buf;
}

double tone_valence(int thousandths, double alpha) {
    const double c = thousandths / 1000.0;
    return c * std::sqrt(alpha / (1.0 - c * c));
}

SynthDataset make_synthetic(const SynthOptions& opts) {
    if (opts.users < 8 || opts.movers + 4 > opts.users)
        throw ConfigError("synth: need at least 8 users and room for the movers");
    if (opts.retweets_min == 0 || opts.retweets_min > opts.retweets_max)
        throw ConfigError("synth: bad retweet range");
    if (!(opts.mover_connectivity_ratio >= 1.0))
        throw ConfigError("synth: mover_connectivity_ratio must be at least 1");

    auto rng = make_stream(opts.seed, stream_id("synth"));
    const std::size_t n = opts.users;

    SynthDataset data;
    data.truth.resize(n);
    const char* anchor_handles[4] = {"realDonaldTrump", "Mike_Pence", "JoeBiden", "KamalaHarris"};
    const std::size_t rep_total = static_cast<std::size_t>(std::llround(opts.majority_fraction * n));
    std::vector<std::size_t> rep_pool, dem_pool;
    for (std::size_t i = 0; i < n; ++i) {
        auto& t = data.truth[i];
        char id[16];
        std::snprintf(id, sizeof id, "u%04zu", i);
        t.user = UserId{id};
        t.handle = i < 4 ? anchor_handles[i] : "user" + std::string(id + 1);
        const bool rep = i < 2 || (i >= 4 && i < rep_total + 2);
        t.community_t1 = rep ? kRep : kDem;
        if (i >= 4)
            (rep ? rep_pool : dem_pool).push_back(i);
    }

    // Movers split between communities in proportion to their sizes.
    const std::size_t rep_movers =
        std::min(rep_pool.size(), static_cast<std::size_t>(std::llround(opts.majority_fraction * opts.movers)));
    const std::size_t dem_movers = std::min(dem_pool.size(), opts.movers - rep_movers);
    std::shuffle(rep_pool.begin(), rep_pool.end(), rng);
    std::shuffle(dem_pool.begin(), dem_pool.end(), rng);
    for (std::size_t k = 0; k < rep_movers; ++k)
        data.truth[rep_pool[k]].is_mover = true;
    for (std::size_t k = 0; k < dem_movers; ++k)
        data.truth[dem_pool[k]].is_mover = true;

    std::uniform_int_distribution<int> base_dist(150, 450);
    std::vector<int> base(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& t = data.truth[i];
        t.community_t2 = t.is_mover ? (t.community_t1 == kRep ? kDem : kRep) : t.community_t1;
        base[i] = (t.community_t1 == kRep ? 1 : -1) * base_dist(rng);
        t.base_sentiment = base[i] / 1000.0;
    }

    std::vector<double> attract(n);
    for (std::size_t i = 0; i < n; ++i)
        attract[i] = i < 4 ? 20.0 : data.truth[i].is_mover ? 1.0 : opts.mover_connectivity_ratio;

    std::uniform_int_distribution<int> noise(-opts.noise_thousandths, opts.noise_thousandths);
    const int drift = static_cast<int>(std::lround(opts.mover_drift * 1000.0));
    std::vector<std::vector<int>> jitter_t1(n);
    std::set<int> tones;
    std::vector<Pending> pending;

    const std::int64_t starts[2] = {kT1Start, kT2Start};
    const std::int64_t ends[2] = {kT2Start, kT2End};
    for (int w = 0; w < 2; ++w) {
        std::uniform_int_distribution<std::int64_t> when(starts[w], ends[w] - 1);
        // Originals first, so retweets can quote them.
        std::vector<std::vector<std::string>> posted(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool mover = data.truth[i].is_mover;
            for (std::size_t k = 0; k < opts.originals; ++k) {
                int jitter = noise(rng);
                if (w == 0)
                    jitter_t1[i].push_back(jitter);
                else if (mover)
                    jitter = jitter_t1[i][k];
                int tone = base[i] + jitter + (w == 1 && mover ? drift : 0);
                tone = std::clamp(tone, -999, 999);
                tones.insert(tone);
                std::string text = "update " + tone_token(tone);
                posted[i].push_back(text);
                pending.push_back({when(rng), i, std::nullopt, std::move(text)});
            }
        }

        std::vector<std::size_t> members[2];
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = w == 0 ? data.truth[i].community_t1 : data.truth[i].community_t2;
            members[c == kRep ? 0 : 1].push_back(i);
        }
        std::discrete_distribution<std::size_t> pick[2];
        for (int c = 0; c < 2; ++c) {
            std::vector<double> wts;
            for (auto m : members[c])
                wts.push_back(attract[m]);
            pick[c] = std::discrete_distribution<std::size_t>(wts.begin(), wts.end());
        }

        std::uniform_int_distribution<std::size_t> made(opts.retweets_min, opts.retweets_max);
        std::bernoulli_distribution cross(opts.cross_fraction);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& own = w == 0 ? data.truth[i].community_t1 : data.truth[i].community_t2;
            const int c_own = own == kRep ? 0 : 1;
            std::size_t count = made(rng);
            if (data.truth[i].is_mover)
                count = std::max<std::size_t>(6, static_cast<std::size_t>(
                                                     std::lround(count / opts.mover_connectivity_ratio)));
            for (std::size_t k = 0; k < count; ++k) {
                const int c = cross(rng) ? 1 - c_own : c_own;
                std::size_t src;
                do {
                    src = members[c][pick[c](rng)];
                } while (src == i);
                std::uniform_int_distribution<std::size_t> which(0, posted[src].size() - 1);
                pending.push_back({when(rng), i, src,
                                   "RT @" + data.truth[src].handle + ": " + posted[src][which(rng)]});
            }
        }
    }

    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending& a, const Pending& b) { return a.timestamp < b.timestamp; });
    data.records.reserve(pending.size());
    for (std::size_t k = 0; k < pending.size(); ++k) {
        const auto& p = pending[k];
        TweetRecord r;
        r.tweet_id = std::to_string(1000000 + k);
        r.author_id = data.truth[p.author].user;
        r.author_handle = data.truth[p.author].handle;
        r.timestamp = p.timestamp;
        r.text = p.text;
        if (p.source) {
            r.retweeted_author_id = data.truth[*p.source].user;
            r.retweeted_author_handle = data.truth[*p.source].handle;
        }
        data.records.push_back(std::move(r));
    }

    for (int tone : tones)
        data.lexicon.add_valence(tone_token(tone), tone_valence(tone));
    data.lexicon.add_booster("very", 0.293);
    data.lexicon.add_negation("not");

    RunConfig& cfg = data.config;
    cfg = default_config();
    cfg.windows = {{"t1", kT1Start, kT2Start}, {"t2", kT2Start, kT2End}};
    cfg.input = "records.jsonl";
    cfg.lexicon = "lexicon.tsv";
    cfg.originals_only = true;
    cfg.seed = opts.seed;
    return data;
}

void write_synthetic(const SynthDataset& data, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw DataError("cannot create '" + dir + "': " + ec.message());
    const fs::path root(dir);

    write_records_file((root / "records.jsonl").string(), data.records);

    std::ofstream lex((root / "lexicon.tsv").string(), std::ios::binary | std::ios::trunc);
    if (!lex)
        throw DataError("cannot write '" + (root / "lexicon.tsv").string() + "'");
    data.lexicon.save(lex);

    write_json_file((root / "config.json").string(), config_to_json(data.config));

    std::vector<csv::Row> rows;
    for (const auto& t : data.truth)
        rows.push_back({t.user.value, t.handle, t.community_t1, t.community_t2, t.is_mover ? "1" : "0",
                        csv::format_double(t.base_sentiment)});
    csv::write((root / "truth.csv").string(),
               {"user_id", "handle", "community_t1", "community_t2", "is_mover", "base_sentiment"}, rows);
}

std::vector<SynthTruth> read_truth_csv(const std::string& path) {
    const csv::Table t = csv::read(path);
    const auto cu = t.column("user_id"), ch = t.column("handle"), c1 = t.column("community_t1"),
               c2 = t.column("community_t2"), cm = t.column("is_mover"), cb = t.column("base_sentiment");
    std::vector<SynthTruth> out;
    for (const auto& r : t.rows)
        out.push_back({UserId{r[cu]}, r[ch], r[c1], r[c2], r[cm] == "1", csv::parse_double(r[cb], "base_sentiment")});
    return out;
}

} // namespace polarshift
