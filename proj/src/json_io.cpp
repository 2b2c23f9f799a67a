#include "polarshift/json_io.hpp"

#include <fstream>

namespace polarshift {

using nlohmann::json;

void to_json(json& j, const ParseReport& r) {
    j = json{{"lines", r.lines},
             {"accepted", r.accepted},
             {"blank", r.blank},
             {"malformed", r.malformed},
             {"missing_field", r.missing_field},
             {"self_retweet", r.self_retweet},
             {"duplicate_id", r.duplicate_id}};
}

void to_json(json& j, const BootstrapSummary& s) {
    j = json{{"mean_of_means", s.mean_of_means},
             {"std_of_means", s.std_of_means},
             {"iterations", s.iterations},
             {"seed", s.seed},
             {"sample_size", s.sample_size},
             {"resample_size", s.resample_size},
             {"raw_mean", s.raw_mean},
             {"raw_std", s.raw_std}};
}

void from_json(const json& j, BootstrapSummary& s) {
    j.at("mean_of_means").get_to(s.mean_of_means);
    j.at("std_of_means").get_to(s.std_of_means);
    j.at("iterations").get_to(s.iterations);
    j.at("seed").get_to(s.seed);
    j.at("sample_size").get_to(s.sample_size);
    j.at("resample_size").get_to(s.resample_size);
    j.at("raw_mean").get_to(s.raw_mean);
    j.at("raw_std").get_to(s.raw_std);
}

void to_json(json& j, const TestResult& r) {
    j = json{{"statistic", r.statistic},
             {"p_value", r.p_value},
             {"method", std::string(to_string(r.method))},
             {"n_per_group", r.n_per_group},
             {"tie_correction_applied", r.tie_correction_applied}};
    if (r.z)
        j["z"] = *r.z;
}

void from_json(const json& j, TestResult& r) {
    j.at("statistic").get_to(r.statistic);
    j.at("p_value").get_to(r.p_value);
    const auto m = j.at("method").get<std::string>();
    if (m == "mann_whitney_u_exact")
        r.method = TestMethod::mann_whitney_u_exact;
    else if (m == "mann_whitney_u_normal")
        r.method = TestMethod::mann_whitney_u_normal;
    else if (m == "kruskal_wallis_chi2")
        r.method = TestMethod::kruskal_wallis_chi2;
    else
        throw DataError("unknown test method '" + m + "'");
    j.at("n_per_group").get_to(r.n_per_group);
    j.at("tie_correction_applied").get_to(r.tie_correction_applied);
    if (j.contains("z"))
        r.z = j.at("z").get<double>();
}

void to_json(json& j, const GroupComparison& c) {
    j = json{{"groups", {c.name_a, c.name_b}},
             {"sizes", {c.a.sample_size, c.b.sample_size}},
             {"bootstrap", {{c.name_a, c.a}, {c.name_b, c.b}}},
             {"mann_whitney_u", c.mwu},
             {"kruskal_wallis", c.kw},
             {"significant", c.significant}};
}

void from_json(const json& j, GroupComparison& c) {
    const auto& names = j.at("groups");
    c.name_a = names.at(0).get<std::string>();
    c.name_b = names.at(1).get<std::string>();
    j.at("bootstrap").at(c.name_a).get_to(c.a);
    j.at("bootstrap").at(c.name_b).get_to(c.b);
    j.at("mann_whitney_u").get_to(c.mwu);
    j.at("kruskal_wallis").get_to(c.kw);
    j.at("significant").get_to(c.significant);
}

void to_json(json& j, const OverlapReport& r) {
    j = json{{"users_t1", r.users_t1}, {"users_t2", r.users_t2}, {"users_both", r.users_both}};
    json labels = json::object();
    for (const auto& [label, o] : r.labels)
        labels[label] = json{{"size_t1", o.size_t1},
                             {"size_t2", o.size_t2},
                             {"pct_t1", o.pct_t1},
                             {"pct_t2", o.pct_t2},
                             {"jaccard_restricted", o.jaccard_restricted},
                             {"jaccard_raw", o.jaccard_raw}};
    j["labels"] = std::move(labels);
}

void to_json(json& j, const Alignment& a) {
    json pairs = json::array();
    for (const auto& [r, s] : a.t1_to_t2)
        pairs.push_back(json{{"block_t1", r}, {"block_t2", s}, {"jaccard", a.jaccard.at(r)}});
    j = json{{"correspondence", pairs}, {"anchor_consistent", a.anchor_consistent}, {"warnings", a.warnings}};
}

void to_json(json& j, const DeltaMatrix& m) {
    json cells = json::array();
    for (const auto& [key, summary] : m.cells) {
        json c{{"label_t1", key.first}, {"label_t2", key.second}, {"users", m.deltas.at(key).size()}};
        c["summary"] = summary ? json(*summary) : json(nullptr);
        cells.push_back(std::move(c));
    }
    j = json{{"labels", m.labels}, {"cells", cells}, {"missing_sentiment", m.missing_sentiment}};
}

void to_json(json& j, const AnchorEvidence& e) {
    j = json{{"handle", e.handle}, {"label", e.label}, {"present", e.user.has_value()}};
    j["user_id"] = e.user ? json(e.user->value) : json(nullptr);
    j["block"] = e.block ? json(*e.block) : json(nullptr);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw DataError("'" + path + "' is not valid JSON");
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out)
        throw DataError("write failed for '" + path + "'");
}

} // namespace polarshift
