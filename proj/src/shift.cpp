#include "polarshift/shift.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "polarshift/csv.hpp"

namespace polarshift {

std::size_t ShiftResult::shifters() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const ShiftRecord& r) { return r.is_shifter; }));
}

namespace {

std::map<BlockId, std::set<UserId>> members(const CommunitySnapshot& s) {
    std::map<BlockId, std::set<UserId>> out;
    for (const auto& [b, label] : s.labels)
        out[b];
    for (const auto& [user, b] : s.block)
        out[b].insert(user);
    return out;
}

template <class Set>
std::size_t intersection_size(const Set& a, const Set& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else
            ++n, ++i, ++j;
    }
    return n;
}

double jaccard(std::size_t inter, std::size_t a, std::size_t b) {
    const std::size_t uni = a + b - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::string label_in(const CommunitySnapshot& s, BlockId b) {
    auto it = s.labels.find(b);
    return it == s.labels.end() ? std::string(kUnlabeled) : it->second;
}

} // namespace

Alignment align(const CommunitySnapshot& t1, const CommunitySnapshot& t2) {
    const auto m1 = members(t1);
    const auto m2 = members(t2);
    for (const auto* m : {&m1, &m2})
        for (const auto& [b, users] : *m)
            if (users.empty())
                throw DataError("align: block " + std::to_string(b) + " is empty");

    struct Pair {
        double j;
        BlockId r, s;
    };
    std::vector<Pair> pairs;
    for (const auto& [r, a] : m1)
        for (const auto& [s, b] : m2)
            pairs.push_back({jaccard(intersection_size(a, b), a.size(), b.size()), r, s});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (x.j != y.j)
            return x.j > y.j;
        return std::tie(x.r, x.s) < std::tie(y.r, y.s);
    });

    Alignment out;
    std::set<BlockId> used2;
    for (const auto& p : pairs) {
        if (out.t1_to_t2.contains(p.r) || used2.contains(p.s))
            continue;
        out.t1_to_t2.emplace(p.r, p.s);
        out.jaccard.emplace(p.r, p.j);
        used2.insert(p.s);
    }
    for (const auto& [r, s] : out.t1_to_t2) {
        const std::string l1 = label_in(t1, r), l2 = label_in(t2, s);
        if (l1 != l2) {
            out.anchor_consistent = false;
            out.warnings.push_back("block " + std::to_string(r) + " (" + l1 + ") at " + t1.window +
                                   " best matches block " + std::to_string(s) + " (" + l2 + ") at " + t2.window);
        }
    }
    return out;
}

ShiftResult detect_shifters(const CommunitySnapshot& t1, const CommunitySnapshot& t2) {
    ShiftResult out;
    for (const auto& [user, b] : t1.block) {
        if (!t2.block.contains(user)) {
            ++out.only_t1;
            continue;
        }
        const std::string& l1 = t1.label_of(user);
        const std::string& l2 = t2.label_of(user);
        out.records.push_back({user, l1, l2, l1 != l2});
    }
    for (const auto& [user, b] : t2.block)
        if (!t1.block.contains(user))
            ++out.only_t2;
    return out;
}

OverlapReport overlap_report(const CommunitySnapshot& t1, const CommunitySnapshot& t2) {
    OverlapReport rep;
    rep.users_t1 = t1.size();
    rep.users_t2 = t2.size();

    std::map<std::string, std::set<UserId>> by_label1, by_label2;
    for (const auto& [b, l] : t1.labels)
        by_label1[l];
    for (const auto& [b, l] : t2.labels)
        by_label2[l];
    for (const auto& [user, b] : t1.block)
        by_label1[t1.label_of(user)].insert(user);
    for (const auto& [user, b] : t2.block)
        by_label2[t2.label_of(user)].insert(user);

    std::set<UserId> both;
    for (const auto& [user, b] : t1.block)
        if (t2.block.contains(user))
            both.insert(user);
    rep.users_both = both.size();

    std::set<std::string> labels;
    for (const auto& [l, s] : by_label1)
        labels.insert(l);
    for (const auto& [l, s] : by_label2)
        labels.insert(l);

    for (const auto& label : labels) {
        const auto& a = by_label1[label];
        const auto& b = by_label2[label];
        LabelOverlap o;
        o.size_t1 = a.size();
        o.size_t2 = b.size();
        o.pct_t1 = rep.users_t1 ? 100.0 * static_cast<double>(a.size()) / static_cast<double>(rep.users_t1) : 0.0;
        o.pct_t2 = rep.users_t2 ? 100.0 * static_cast<double>(b.size()) / static_cast<double>(rep.users_t2) : 0.0;
        o.jaccard_raw = jaccard(intersection_size(a, b), a.size(), b.size());

        std::set<UserId> ra, rb;
        std::set_intersection(a.begin(), a.end(), both.begin(), both.end(), std::inserter(ra, ra.end()));
        std::set_intersection(b.begin(), b.end(), both.begin(), both.end(), std::inserter(rb, rb.end()));
        o.jaccard_restricted = jaccard(intersection_size(ra, rb), ra.size(), rb.size());
        rep.labels.emplace(label, o);
    }
    return rep;
}

void write_shift_csv(const ShiftResult& result, const std::string& path) {
    std::vector<csv::Row> rows;
    rows.reserve(result.records.size());
    for (const auto& r : result.records)
        rows.push_back({r.user.value, r.label_t1, r.label_t2, r.is_shifter ? "1" : "0"});
    csv::write(path, {"user_id", "label_t1", "label_t2", "is_shifter"}, rows);
}

ShiftResult read_shift_csv(const std::string& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_user = t.column("user_id"), c1 = t.column("label_t1"), c2 = t.column("label_t2"),
                      cs = t.column("is_shifter");
    ShiftResult out;
    for (const auto& r : t.rows) {
        const bool shifter = r[cs] == "1" || r[cs] == "true";
        if (shifter != (r[c1] != r[c2]))
            throw DataError(path + ": is_shifter inconsistent with labels for user '" + r[c_user] + "'");
        out.records.push_back({UserId(r[c_user]), r[c1], r[c2], shifter});
    }
    return out;
}

} // namespace polarshift
