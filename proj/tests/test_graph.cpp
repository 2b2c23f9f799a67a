#include "doctest.h"

#include <map>
#include <set>
#include <random>

#include "oracles.hpp"
#include "polarshift/graph.hpp"

using namespace polarshift;

namespace {

TweetRecord retweet(const std::string& retweeter, const std::string& creator, std::int64_t ts = 0) {
    static int next_id = 0;
    TweetRecord r;
    r.tweet_id = std::to_string(++next_id);
    r.author_id = UserId{retweeter};
    r.author_handle = "@" + retweeter;
    r.timestamp = ts;
    r.text = "RT";
    r.retweeted_author_id = UserId{creator};
    r.retweeted_author_handle = "@" + creator;
    return r;
}

TweetRecord original(const std::string& author, std::int64_t ts = 0) {
    TweetRecord r = retweet(author, "x", ts);
    r.retweeted_author_id.reset();
    r.retweeted_author_handle.reset();
    return r;
}

std::uint64_t weight(const InteractionGraph& g, const std::string& a, const std::string& b) {
    auto s = g.find(UserId{a}), t = g.find(UserId{b});
    if (!s || !t)
        return 0;
    for (auto i : g.out_edges(*s))
        if (g.edges()[i].dst == *t)
            return g.edges()[i].weight;
    return 0;
}

} // namespace

TEST_SUITE("graph") {

TEST_CASE("originals create neither edges nor nodes") {
    std::vector<TweetRecord> recs{original("a"), original("b")};
    auto g = build_graph(recs, "t1");
    CHECK(g.node_count() == 0);
    CHECK(g.edge_count() == 0);
}

TEST_CASE("repeated retweets fold into one weighted edge creator to retweeter") {
    std::vector<TweetRecord> recs{retweet("B", "A"), retweet("B", "A")};
    auto g = build_graph(recs, "t1");
    REQUIRE(g.edge_count() == 1);
    CHECK(weight(g, "A", "B") == 2);
    CHECK(weight(g, "B", "A") == 0);
}

TEST_CASE("six-user fixture matches the hand-built adjacency") {
    // Events as (retweeter, creator).
    const std::vector<std::pair<std::string, std::string>> events{
        {"b", "a"}, {"c", "a"}, {"c", "a"}, {"a", "b"}, {"d", "c"}, {"e", "c"},
        {"e", "c"}, {"e", "c"}, {"f", "e"}, {"a", "f"}, {"b", "f"}, {"d", "a"}};
    std::vector<TweetRecord> recs;
    for (const auto& [r, c] : events)
        recs.push_back(retweet(r, c));
    recs.push_back(original("a"));
    auto g = build_graph(recs, "t1");

    const std::map<std::pair<std::string, std::string>, std::uint64_t> expected{
        {{"a", "b"}, 1}, {{"a", "c"}, 2}, {{"b", "a"}, 1}, {{"c", "d"}, 1}, {{"c", "e"}, 3},
        {{"e", "f"}, 1}, {{"f", "a"}, 1}, {{"f", "b"}, 1}, {{"a", "d"}, 1}};
    CHECK(g.node_count() == 6);
    CHECK(g.edge_count() == expected.size());
    const std::string names = "abcdef";
    for (char s : names)
        for (char t : names) {
            auto it = expected.find({std::string(1, s), std::string(1, t)});
            CHECK(weight(g, std::string(1, s), std::string(1, t)) == (it == expected.end() ? 0 : it->second));
        }
    CHECK(g.total_weight() == events.size());
}

TEST_CASE("node order is first appearance, creator first") {
    std::vector<TweetRecord> recs{retweet("y", "x"), retweet("z", "y"), retweet("x", "w")};
    auto g = build_graph(recs, "t1");
    REQUIRE(g.node_count() == 4);
    CHECK(g.user(0).value == "x");
    CHECK(g.user(1).value == "y");
    CHECK(g.user(2).value == "z");
    CHECK(g.user(3).value == "w");
}

TEST_CASE("latest handle wins") {
    auto r1 = retweet("b", "a", 10);
    auto r2 = retweet("b", "a", 20);
    r2.retweeted_author_handle = "@renamed";
    std::vector<TweetRecord> recs{r2, r1};
    auto g = build_graph(recs, "t1");
    CHECK(g.handle(*g.find(UserId{"a"})) == "@renamed");
}

TEST_CASE("weight total equals retweet events") {
    std::mt19937_64 rng(5);
    std::vector<TweetRecord> recs;
    std::size_t retweets = 0;
    for (int i = 0; i < 500; ++i) {
        const auto a = "u" + std::to_string(rng() % 30), b = "u" + std::to_string(rng() % 30);
        if (a == b || rng() % 4 == 0) {
            recs.push_back(original(a));
            continue;
        }
        recs.push_back(retweet(a, b));
        ++retweets;
    }
    CHECK(build_graph(recs, "t1").total_weight() == retweets);
}

TEST_CASE("activity filter uses strict counts on the unfiltered graph") {
    std::vector<TweetRecord> recs;
    // m made 6 and received none: kept.
    for (int i = 0; i < 6; ++i)
        recs.push_back(retweet("m", "c" + std::to_string(i)));
    // f made 5 and received 5: removed.
    for (int i = 0; i < 5; ++i)
        recs.push_back(retweet("f", "m"));
    for (int i = 0; i < 5; ++i)
        recs.push_back(retweet("g" + std::to_string(i), "f"));
    auto g = filter_by_activity(build_graph(recs, "t1"), 5);
    CHECK(g.find(UserId{"m"}));
    CHECK_FALSE(g.find(UserId{"f"}));
}

TEST_CASE("twelve-node fixture survivors match the hand count") {
    // hub received 11, r6 received 9, m6 made 6, q0 made 7: kept.
    // e5 made 5 and received 5, p0 received 5: dropped with the rest.
    std::vector<TweetRecord> recs;
    for (int i = 0; i < 8; ++i)
        recs.push_back(retweet("p" + std::to_string(i % 4), "hub"));
    for (int i = 0; i < 6; ++i)
        recs.push_back(retweet("q" + std::to_string(i % 3), "r6"));
    for (int i = 0; i < 6; ++i)
        recs.push_back(retweet("m6", i % 2 ? "hub" : "r6"));
    for (int i = 0; i < 5; ++i)
        recs.push_back(retweet("e5", "p0"));
    for (int i = 0; i < 5; ++i)
        recs.push_back(retweet("q0", "e5"));
    recs.push_back(retweet("z", "p1"));
    auto raw = build_graph(recs, "t1");
    CHECK(raw.node_count() == 12);
    auto g = filter_by_activity(raw, 5);
    std::set<std::string> kept;
    for (const auto& u : g.users())
        kept.insert(u.value);
    CHECK(kept == std::set<std::string>{"hub", "r6", "m6", "q0"});
    for (const auto& e : g.edges()) {
        CHECK(kept.count(g.user(e.src).value));
        CHECK(kept.count(g.user(e.dst).value));
    }
}

TEST_CASE("invalid graphs are rejected") {
    auto users = oracle::ids({"a", "b"});
    std::vector<std::string> h{"a", "b"};
    CHECK_THROWS_AS(InteractionGraph("t", users, h, {{0, 0, 1}}), DataError);
    CHECK_THROWS_AS(InteractionGraph("t", users, h, {{0, 1, 0}}), DataError);
    CHECK_THROWS_AS(InteractionGraph("t", users, h, {{0, 1, 1}, {0, 1, 2}}), DataError);
    CHECK_THROWS_AS(InteractionGraph("t", users, h, {{0, 5, 1}}), DataError);
    CHECK_THROWS_AS(InteractionGraph("t", oracle::ids({"a", "a"}), h, {}), DataError);
}

TEST_CASE("edge list export is sorted and round-trips") {
    oracle::TempDir dir("graph_io");
    SUBCASE("empty graph writes a header only") {
        InteractionGraph g("t1", {}, {}, {});
        export_edgelist(g, dir.file("e.csv"));
        CHECK(oracle::slurp(dir.file("e.csv")) == "src,dst,weight\n");
    }
    SUBCASE("two edges come out sorted") {
        InteractionGraph g("t1", oracle::ids({"b", "a", "c"}), {"hb", "ha", "hc"}, {{0, 2, 1}, {1, 0, 4}});
        export_edgelist(g, dir.file("e.csv"));
        CHECK(oracle::slurp(dir.file("e.csv")) == "src,dst,weight\na,b,4\nb,c,1\n");
    }
    SUBCASE("random graphs survive export and import") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto g = oracle::random_graph(25, 80, 4, seed);
            export_edgelist(g, dir.file("e.csv"));
            export_node_table(g, dir.file("n.csv"));
            CHECK(import_graph(dir.file("e.csv"), dir.file("n.csv"), "t1") == g);
        }
    }
}

}
