#include "doctest.h"

#include <random>
#include <sstream>

#include "polarshift/ingest.hpp"

using namespace polarshift;

namespace {

ParseResult parse(const std::string& text, bool strict = false) {
    std::istringstream in(text);
    return parse_records(in, strict);
}

TweetRecord record(std::string id, std::string author, std::int64_t ts, std::optional<std::string> source = {}) {
    TweetRecord r;
    r.tweet_id = std::move(id);
    r.author_id = UserId{author};
    r.author_handle = "h_" + author;
    r.timestamp = ts;
    r.text = "text of " + r.tweet_id;
    if (source) {
        r.retweeted_author_id = UserId{*source};
        r.retweeted_author_handle = "h_" + *source;
    }
    return r;
}

} // namespace

TEST_SUITE("ingest") {

TEST_CASE("empty stream gives no records and a zero report") {
    auto res = parse("");
    CHECK(res.records.empty());
    CHECK(res.report == ParseReport{});
}

TEST_CASE("one retweet line round-trips its fields") {
    auto res = parse(R"({"tweet_id":"10","author_id":"7","author_handle":"bob","timestamp":1589000000,)"
                     R"("text":"RT hi","retweeted_author_id":"3","retweeted_author_handle":"ann"})"
                     "\n");
    REQUIRE(res.records.size() == 1);
    const auto& r = res.records[0];
    CHECK(r.tweet_id == "10");
    CHECK(r.author_id.value == "7");
    CHECK(r.author_handle == "bob");
    CHECK(r.timestamp == 1589000000);
    REQUIRE(r.retweeted_author_id);
    CHECK(r.retweeted_author_id->value == "3");
    CHECK(r.retweeted_author_handle == "ann");
    CHECK(res.report.accepted == 1);
}

TEST_CASE("missing timestamp is counted in lenient mode") {
    auto res = parse(R"({"tweet_id":"1","author_id":"7","author_handle":"bob","text":"x"})"
                     "\n");
    CHECK(res.records.empty());
    CHECK(res.report.missing_field == 1);
    CHECK(res.report.lines == 1);
}

TEST_CASE("strict mode aborts at the first bad line with its number") {
    const std::string text = R"({"tweet_id":"1","author_id":"7","author_handle":"b","timestamp":5,"text":"x"})"
                             "\n{oops\n";
    try {
        parse(text, true);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("lenient mode counts each reason") {
    const std::string text =
        R"({"tweet_id":"1","author_id":"7","author_handle":"b","timestamp":5,"text":"x"})"
        "\n\n"
        "not json\n"
        R"({"tweet_id":"2","author_id":"7","author_handle":"b","timestamp":6,"text":"x","retweeted_author_id":"7"})"
        "\n"
        R"({"tweet_id":"1","author_id":"8","author_handle":"c","timestamp":7,"text":"y"})"
        "\n";
    auto res = parse(text);
    CHECK(res.report.lines == 5);
    CHECK(res.report.blank == 1);
    CHECK(res.report.malformed == 1);
    CHECK(res.report.self_retweet == 1);
    CHECK(res.report.duplicate_id == 1);
}

TEST_CASE("ISO UTC timestamps are accepted") {
    auto res = parse(R"({"tweet_id":"1","author_id":"7","author_handle":"b","timestamp":"2020-05-09T00:00:00Z","text":"x"})"
                     "\n");
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].timestamp == 1588982400);
    CHECK(parse_iso_utc("2020-05-09T00:00:00+00:00") == 1588982400);
    CHECK_FALSE(parse_iso_utc("2020-05-09T00:00:00+02:00"));
    CHECK_FALSE(parse_iso_utc("2020-02-30T00:00:00Z"));
}

TEST_CASE("parse, serialize, parse is the identity") {
    std::mt19937_64 rng(11);
    std::vector<TweetRecord> recs;
    for (int i = 0; i < 50; ++i) {
        auto r = record(std::to_string(i), std::to_string(rng() % 9), static_cast<std::int64_t>(rng() % 100000),
                        i % 3 ? std::optional<std::string>{} : std::optional<std::string>{"src" + std::to_string(i)});
        r.text = "quote \" tab\t unicode \xc3\xa9 " + std::to_string(i);
        recs.push_back(r);
    }
    std::ostringstream out;
    write_records(out, recs);
    auto again = parse(out.str(), true);
    CHECK(again.records == recs);
}

TEST_CASE("window slice is half-open and keeps order") {
    const TimeWindow w{"t1", 100, 200};
    std::vector<TweetRecord> recs;
    const std::int64_t stamps[10] = {99, 100, 150, 250, 199, 200, 0, 120, 300, 1000};
    for (int i = 0; i < 10; ++i)
        recs.push_back(record(std::to_string(i), "a", stamps[i]));
    auto got = window_slice(recs, w);
    REQUIRE(got.size() == 4);
    CHECK(got[0].tweet_id == "1");
    CHECK(got[1].tweet_id == "2");
    CHECK(got[2].tweet_id == "4");
    CHECK(got[3].tweet_id == "7");
}

TEST_CASE("disjoint windows give disjoint slices") {
    std::mt19937_64 rng(3);
    std::vector<TweetRecord> recs;
    for (int i = 0; i < 200; ++i)
        recs.push_back(record(std::to_string(i), "a", static_cast<std::int64_t>(rng() % 400)));
    auto a = window_slice(recs, {"t1", 0, 200});
    auto b = window_slice(recs, {"t2", 200, 400});
    CHECK(a.size() + b.size() == recs.size());
    for (const auto& x : a)
        for (const auto& y : b)
            CHECK(x.tweet_id != y.tweet_id);
}

TEST_CASE("window validation") {
    std::vector<TimeWindow> ok{{"t1", 0, 10}, {"t2", 10, 20}};
    CHECK_NOTHROW(validate_windows(ok));
    std::vector<TimeWindow> inverted{{"t1", 10, 10}};
    CHECK_THROWS_AS(validate_windows(inverted), ConfigError);
    std::vector<TimeWindow> dup{{"t1", 0, 10}, {"t1", 10, 20}};
    CHECK_THROWS_AS(validate_windows(dup), ConfigError);
}

TEST_CASE("report merge is an associative sum") {
    ParseReport a{3, 1, 1, 1, 0, 0, 0}, b{2, 2, 0, 0, 0, 0, 0}, c{4, 0, 0, 1, 1, 1, 1};
    ParseReport left = a;
    left += b;
    left += c;
    ParseReport bc = b;
    bc += c;
    ParseReport right = a;
    right += bc;
    CHECK(left == right);
    CHECK(left.lines == 9);
}

}
