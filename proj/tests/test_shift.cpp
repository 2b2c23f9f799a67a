#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "polarshift/shift.hpp"

using namespace polarshift;

namespace {

CommunitySnapshot snapshot(const std::string& window, const std::map<std::string, BlockId>& blocks,
                           std::map<BlockId, std::string> labels = {{0, "rep"}, {1, "dem"}}) {
    CommunitySnapshot s;
    s.window = window;
    for (const auto& [u, b] : blocks)
        s.block.emplace(UserId{u}, b);
    s.labels = std::move(labels);
    return s;
}

std::string uname(int i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "u%03d", i);
    return buf;
}

} // namespace

TEST_SUITE("shift") {

TEST_CASE("alignment of a window with itself is the identity") {
    auto s = snapshot("t1", {{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}});
    auto a = align(s, s);
    CHECK(a.t1_to_t2 == std::map<BlockId, BlockId>{{0, 0}, {1, 1}});
    CHECK(a.jaccard.at(0) == 1.0);
    CHECK(a.anchor_consistent);
}

TEST_CASE("alignment follows members across a block index swap") {
    auto s1 = snapshot("t1", {{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}});
    auto s2 = snapshot("t2", {{"a", 1}, {"b", 1}, {"c", 0}, {"d", 0}}, {{0, "dem"}, {1, "rep"}});
    auto a = align(s1, s2);
    CHECK(a.t1_to_t2 == std::map<BlockId, BlockId>{{0, 1}, {1, 0}});
    CHECK(a.anchor_consistent);

    auto mislabeled = snapshot("t2", {{"a", 1}, {"b", 1}, {"c", 0}, {"d", 0}});
    auto w = align(s1, mislabeled);
    CHECK_FALSE(w.anchor_consistent);
    CHECK(w.warnings.size() == 2);
}

TEST_CASE("empty labeled block cannot be aligned") {
    auto s1 = snapshot("t1", {{"a", 0}, {"b", 0}});
    auto s2 = snapshot("t2", {{"a", 0}, {"b", 1}});
    CHECK_THROWS_AS(align(s1, s2), DataError);
}

TEST_CASE("hundred-user fixture with ten movers") {
    std::map<std::string, BlockId> b1, b2;
    std::set<std::string> movers;
    for (int i = 0; i < 100; ++i) {
        const BlockId home = i < 50 ? 0 : 1;
        const bool moves = (i < 5) || (i >= 50 && i < 55);
        if (moves)
            movers.insert(uname(i));
        b1[uname(i)] = home;
        // Block indices are swapped at t2; labels follow them.
        b2[uname(i)] = moves ? home : 1 - home;
    }
    b1["only1"] = 0;
    b2["only2a"] = 1;
    b2["only2b"] = 0;
    auto s1 = snapshot("t1", b1);
    auto s2 = snapshot("t2", b2, {{0, "dem"}, {1, "rep"}});
    auto r = detect_shifters(s1, s2);
    CHECK(r.records.size() == 100);
    CHECK(r.only_t1 == 1);
    CHECK(r.only_t2 == 2);
    CHECK(r.shifters() == 10);
    CHECK(r.stayers() == 90);
    for (const auto& rec : r.records) {
        CHECK(rec.is_shifter == movers.contains(rec.user.value));
        CHECK(rec.is_shifter == (rec.label_t1 != rec.label_t2));
    }
}

TEST_CASE("shifters and stayers partition the users present in both windows") {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        std::map<std::string, BlockId> b1, b2;
        std::size_t both = 0;
        for (int i = 0; i < 60; ++i) {
            const unsigned pick = rng() % 4;
            if (pick != 1)
                b1[uname(i)] = rng() % 2;
            if (pick != 2)
                b2[uname(i)] = rng() % 2;
            both += pick >= 3 || pick == 0;
        }
        b1["x0"] = 0, b1["x1"] = 1, b2["x0"] = 0, b2["x1"] = 1;
        both += 2;
        auto r = detect_shifters(snapshot("t1", b1), snapshot("t2", b2));
        CHECK(r.shifters() + r.stayers() == both);
        CHECK(r.records.size() + r.only_t1 == b1.size());
        CHECK(r.records.size() + r.only_t2 == b2.size());
    }
}

TEST_CASE("overlap ratios on a hand fixture") {
    auto s1 = snapshot("t1", {{"a", 0}, {"b", 0}, {"c", 0}, {"d", 1}, {"e", 1}});
    auto s2 = snapshot("t2", {{"a", 0}, {"b", 0}, {"d", 0}, {"f", 0}, {"c", 1}, {"e", 1}});
    auto o = overlap_report(s1, s2);
    CHECK(o.users_t1 == 5);
    CHECK(o.users_t2 == 6);
    CHECK(o.users_both == 5);
    const auto& rep = o.labels.at("rep");
    CHECK(rep.size_t1 == 3);
    CHECK(rep.size_t2 == 4);
    CHECK(rep.pct_t1 == doctest::Approx(60.0));
    CHECK(rep.pct_t2 == doctest::Approx(400.0 / 6.0));
    CHECK(rep.jaccard_raw == doctest::Approx(0.4));
    CHECK(rep.jaccard_restricted == doctest::Approx(0.5));
    const auto& dem = o.labels.at("dem");
    CHECK(dem.jaccard_raw == doctest::Approx(1.0 / 3.0));
    CHECK(dem.jaccard_restricted == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("overlap is symmetric and bounded") {
    std::mt19937_64 rng(10);
    for (int k = 0; k < 20; ++k) {
        std::map<std::string, BlockId> b1, b2;
        for (int i = 0; i < 40; ++i) {
            if (rng() % 5)
                b1[uname(i)] = rng() % 2;
            if (rng() % 5)
                b2[uname(i)] = rng() % 2;
        }
        auto s1 = snapshot("t1", b1), s2 = snapshot("t2", b2);
        auto ab = overlap_report(s1, s2), ba = overlap_report(s2, s1);
        for (const auto& [label, o] : ab.labels) {
            const auto& r = ba.labels.at(label);
            CHECK(o.jaccard_raw == r.jaccard_raw);
            CHECK(o.jaccard_restricted == r.jaccard_restricted);
            CHECK(o.size_t1 == r.size_t2);
            CHECK(o.jaccard_raw >= 0.0);
            CHECK(o.jaccard_raw <= 1.0);
        }
    }
}

TEST_CASE("identical and disjoint memberships") {
    auto s = snapshot("t1", {{"a", 0}, {"b", 1}, {"c", 1}});
    for (const auto& [label, o] : overlap_report(s, s).labels) {
        CHECK(o.jaccard_raw == 1.0);
        CHECK(o.jaccard_restricted == 1.0);
    }
    auto other = snapshot("t2", {{"x", 0}, {"y", 1}});
    for (const auto& [label, o] : overlap_report(s, other).labels)
        CHECK(o.jaccard_raw == 0.0);
}

TEST_CASE("no shifters gives restricted overlap of one") {
    auto s1 = snapshot("t1", {{"a", 0}, {"b", 1}, {"c", 1}, {"gone", 0}});
    auto s2 = snapshot("t2", {{"a", 0}, {"b", 1}, {"c", 1}, {"new", 1}});
    REQUIRE(detect_shifters(s1, s2).shifters() == 0);
    auto o = overlap_report(s1, s2);
    for (const auto& [label, lo] : o.labels)
        CHECK(lo.jaccard_restricted == 1.0);
    CHECK(o.labels.at("rep").jaccard_raw == doctest::Approx(1.0 / 2.0));
}

TEST_CASE("shift CSV round trip and consistency check") {
    oracle::TempDir dir("shift");
    ShiftResult r;
    r.records = {{UserId{"a"}, "rep", "dem", true}, {UserId{"b"}, "dem", "dem", false}};
    write_shift_csv(r, dir.file("s.csv"));
    CHECK(read_shift_csv(dir.file("s.csv")).records == r.records);

    std::ofstream(dir.file("bad.csv")) << "user_id,label_t1,label_t2,is_shifter\na,rep,rep,1\n";
    CHECK_THROWS_AS(read_shift_csv(dir.file("bad.csv")), DataError);
}

}
