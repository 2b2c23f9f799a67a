#include "polarshift/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

namespace polarshift {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reads keys off one JSON object and complains about anything left over.
class Section {
public:
    Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object())
            throw ConfigError(where_ + ": expected an object");
    }

    bool has(const char* key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <class T>
    void get(const char* key, T& out) {
        if (!has(key))
            return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    double number(const char* key, double fallback) {
        double v = fallback;
        get(key, v);
        return v;
    }

    const json& raw(const char* key) const { return j_.at(key); }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key))
                throw ConfigError(where_ + ": unknown key '" + key + "'");
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::int64_t timestamp_of(const json& j, const std::string& where) {
    if (j.is_number_integer())
        return j.get<std::int64_t>();
    if (j.is_string()) {
        if (auto t = parse_iso_utc(j.get<std::string>()))
            return *t;
    }
    throw ConfigError(where + ": expected epoch seconds or an ISO-8601 UTC timestamp");
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (path.empty() || fs::path(path).is_absolute() || base_dir.empty())
        return path;
    return (fs::path(base_dir) / path).lexically_normal().string();
}

SentimentClass class_of(const std::string& s, const std::string& where) {
    if (s == "positive")
        return SentimentClass::positive;
    if (s == "negative")
        return SentimentClass::negative;
    if (s == "neutral")
        return SentimentClass::neutral;
    throw ConfigError(where + ": polarity must be positive, negative or neutral");
}

} // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.anchors = {{"realDonaldTrump", "republican"},
                   {"Mike_Pence", "republican"},
                   {"JoeBiden", "democratic"},
                   {"KamalaHarris", "democratic"}};
    cfg.polarity = {{"republican", SentimentClass::positive}, {"democratic", SentimentClass::negative}};
    return cfg;
}

RunConfig parse_config(const json& j, const std::string& base_dir) {
    RunConfig cfg = default_config();
    Section top(j, "config");

    if (top.has("windows")) {
        const json& ws = top.raw("windows");
        if (!ws.is_array())
            throw ConfigError("config.windows: expected an array");
        for (std::size_t i = 0; i < ws.size(); ++i) {
            Section w(ws[i], "config.windows[" + std::to_string(i) + "]");
            TimeWindow tw;
            w.get("name", tw.name);
            if (!w.has("start") || !w.has("end"))
                throw ConfigError(w.where() + ": start and end are required");
            tw.start = timestamp_of(w.raw("start"), w.where() + ".start");
            tw.end = timestamp_of(w.raw("end"), w.where() + ".end");
            w.finish();
            if (tw.name.empty())
                tw.name = "t" + std::to_string(i + 1);
            cfg.windows.push_back(std::move(tw));
        }
    }

    top.get("input", cfg.input);
    cfg.input = resolve(cfg.input, base_dir);
    top.get("strict_ingest", cfg.strict_ingest);
    top.get("activity_threshold", cfg.activity_threshold);
    top.get("seed", cfg.seed);
    top.get("histogram_bins", cfg.histogram_bins);

    if (top.has("sbm")) {
        Section s(top.raw("sbm"), "config.sbm");
        s.get("blocks", cfg.blocks);
        s.get("sweeps", cfg.sbm.sweeps);
        s.get("chains", cfg.sbm.chains);
        cfg.sbm.epsilon = s.number("epsilon", cfg.sbm.epsilon);
        cfg.sbm.beta = s.number("beta", cfg.sbm.beta);
        s.get("early_stop_window", cfg.sbm.early_stop_window);
        cfg.sbm.early_stop_tol = s.number("early_stop_tol", cfg.sbm.early_stop_tol);
        cfg.sbm.merge_fraction = s.number("merge_fraction", cfg.sbm.merge_fraction);
        s.get("parallel", cfg.sbm.parallel);
        if (s.has("init")) {
            std::string init;
            s.get("init", init);
            if (init == "agglomerative")
                cfg.sbm.init = InitMode::agglomerative;
            else if (init == "random")
                cfg.sbm.init = InitMode::random;
            else
                throw ConfigError("config.sbm.init: expected agglomerative or random");
        }
        s.finish();
    }

    if (top.has("pagerank")) {
        Section s(top.raw("pagerank"), "config.pagerank");
        cfg.pagerank.damping = s.number("damping", cfg.pagerank.damping);
        cfg.pagerank.tol = s.number("tol", cfg.pagerank.tol);
        s.get("max_iter", cfg.pagerank.max_iter);
        s.finish();
    }

    if (top.has("stats")) {
        Section s(top.raw("stats"), "config.stats");
        s.get("bootstrap_iterations", cfg.stats.bootstrap_iterations);
        cfg.stats.subsample_fraction = s.number("subsample_fraction", cfg.stats.subsample_fraction);
        s.get("exact_cutoff", cfg.stats.exact_cutoff);
        cfg.stats.alpha = s.number("alpha", cfg.stats.alpha);
        s.finish();
    }

    if (top.has("sentiment")) {
        Section s(top.raw("sentiment"), "config.sentiment");
        s.get("lexicon", cfg.lexicon);
        cfg.lexicon = resolve(cfg.lexicon, base_dir);
        s.get("originals_only", cfg.originals_only);
        if (s.has("rules")) {
            Section r(s.raw("rules"), "config.sentiment.rules");
            SentimentRules& rules = cfg.rules;
            rules.negation_scalar = r.number("negation_scalar", rules.negation_scalar);
            r.get("negation_window", rules.negation_window);
            if (r.has("booster_decay")) {
                std::vector<double> decay;
                r.get("booster_decay", decay);
                if (decay.size() != rules.booster_decay.size())
                    throw ConfigError("config.sentiment.rules.booster_decay: expected 3 values");
                std::copy(decay.begin(), decay.end(), rules.booster_decay.begin());
            }
            rules.caps_increment = r.number("caps_increment", rules.caps_increment);
            rules.exclamation_increment = r.number("exclamation_increment", rules.exclamation_increment);
            r.get("exclamation_cap", rules.exclamation_cap);
            rules.alpha = r.number("alpha", rules.alpha);
            rules.positive_threshold = r.number("positive_threshold", rules.positive_threshold);
            rules.negative_threshold = r.number("negative_threshold", rules.negative_threshold);
            r.finish();
        }
        s.finish();
    }

    if (top.has("anchors")) {
        AnchorMap anchors;
        top.get("anchors", anchors);
        cfg.anchors = std::move(anchors);
    }
    if (top.has("polarity")) {
        std::map<std::string, std::string> raw;
        top.get("polarity", raw);
        cfg.polarity.clear();
        for (const auto& [label, cls] : raw)
            cfg.polarity[label] = class_of(cls, "config.polarity." + label);
    }
    top.finish();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("config '" + path + "' is not valid JSON");
    auto base = fs::absolute(fs::path(path)).parent_path().string();
    return parse_config(j, base);
}

json config_to_json(const RunConfig& cfg) {
    json windows = json::array();
    for (const auto& w : cfg.windows)
        windows.push_back({{"name", w.name}, {"start", w.start}, {"end", w.end}});
    json polarity = json::object();
    for (const auto& [label, cls] : cfg.polarity)
        polarity[label] = std::string(to_string(cls));
    const auto& r = cfg.rules;
    return json{
        {"windows", windows},
        {"input", cfg.input},
        {"strict_ingest", cfg.strict_ingest},
        {"activity_threshold", cfg.activity_threshold},
        {"seed", cfg.seed},
        {"histogram_bins", cfg.histogram_bins},
        {"sbm",
         {{"blocks", cfg.blocks},
          {"sweeps", cfg.sbm.sweeps},
          {"chains", cfg.sbm.chains},
          {"init", cfg.sbm.init == InitMode::agglomerative ? "agglomerative" : "random"},
          {"epsilon", cfg.sbm.epsilon},
          {"beta", cfg.sbm.beta},
          {"early_stop_window", cfg.sbm.early_stop_window},
          {"early_stop_tol", cfg.sbm.early_stop_tol},
          {"merge_fraction", cfg.sbm.merge_fraction},
          {"parallel", cfg.sbm.parallel}}},
        {"pagerank", {{"damping", cfg.pagerank.damping}, {"tol", cfg.pagerank.tol}, {"max_iter", cfg.pagerank.max_iter}}},
        {"stats",
         {{"bootstrap_iterations", cfg.stats.bootstrap_iterations},
          {"subsample_fraction", cfg.stats.subsample_fraction},
          {"exact_cutoff", cfg.stats.exact_cutoff},
          {"alpha", cfg.stats.alpha}}},
        {"sentiment",
         {{"lexicon", cfg.lexicon},
          {"originals_only", cfg.originals_only},
          {"rules",
           {{"negation_scalar", r.negation_scalar},
            {"negation_window", r.negation_window},
            {"booster_decay", r.booster_decay},
            {"caps_increment", r.caps_increment},
            {"exclamation_increment", r.exclamation_increment},
            {"exclamation_cap", r.exclamation_cap},
            {"alpha", r.alpha},
            {"positive_threshold", r.positive_threshold},
            {"negative_threshold", r.negative_threshold}}}}},
        {"anchors", cfg.anchors},
        {"polarity", polarity},
    };
}

void validate_config(const RunConfig& cfg) {
    if (cfg.windows.size() != 2)
        throw ConfigError("config: exactly two windows are required, got " + std::to_string(cfg.windows.size()));
    validate_windows(cfg.windows);
    if (cfg.blocks < 2)
        throw ConfigError("config.sbm.blocks must be at least 2");
    if (cfg.sbm.sweeps == 0 || cfg.sbm.chains == 0)
        throw ConfigError("config.sbm: sweeps and chains must be positive");
    if (!(cfg.sbm.merge_fraction > 0.0 && cfg.sbm.merge_fraction <= 1.0))
        throw ConfigError("config.sbm.merge_fraction must lie in (0, 1]");
    if (!(cfg.pagerank.damping > 0.0 && cfg.pagerank.damping < 1.0))
        throw ConfigError("config.pagerank.damping must lie in (0, 1)");
    if (!(cfg.pagerank.tol > 0.0) || cfg.pagerank.max_iter == 0)
        throw ConfigError("config.pagerank: tol and max_iter must be positive");
    if (cfg.stats.bootstrap_iterations == 0)
        throw ConfigError("config.stats.bootstrap_iterations must be positive");
    if (!(cfg.stats.subsample_fraction > 0.0 && cfg.stats.subsample_fraction <= 1.0))
        throw ConfigError("config.stats.subsample_fraction must lie in (0, 1]");
    if (!(cfg.stats.alpha > 0.0 && cfg.stats.alpha < 1.0))
        throw ConfigError("config.stats.alpha must lie in (0, 1)");
    if (cfg.histogram_bins == 0)
        throw ConfigError("config.histogram_bins must be positive");
    if (cfg.rules.negative_threshold > cfg.rules.positive_threshold)
        throw ConfigError("config.sentiment.rules: negative_threshold exceeds positive_threshold");
    if (!(cfg.rules.alpha > 0.0))
        throw ConfigError("config.sentiment.rules.alpha must be positive");
    if (cfg.anchors.empty())
        throw ConfigError("config.anchors must not be empty");
    for (const auto& [label, _] : cfg.polarity) {
        bool anchored = false;
        for (const auto& [handle, l] : cfg.anchors)
            anchored = anchored || l == label;
        if (!anchored)
            throw ConfigError("config.polarity: label '" + label + "' has no anchor account");
    }
}

std::string default_lexicon_path() { return std::string(POLARSHIFT_DATA_DIR) + "/lexicon.tsv"; }

SentimentLexicon load_lexicon(const RunConfig& cfg) {
    const std::string path = cfg.lexicon.empty() ? default_lexicon_path() : cfg.lexicon;
    try {
        return SentimentLexicon::load_file(path);
    } catch (const DataError& e) {
        throw ConfigError(std::string("lexicon: ") + e.what());
    }
}

} // namespace polarshift
