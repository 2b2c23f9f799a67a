#include "polarshift/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "polarshift/csv.hpp"
#include "polarshift/json_io.hpp"
#include "polarshift/shift.hpp"

namespace polarshift {

using nlohmann::json;
namespace fs = std::filesystem;

std::string OutDir::file(const std::string& name) const { return (fs::path(root) / name).string(); }

std::string OutDir::window_file(const TimeWindow& w, const std::string& name) const {
    return (fs::path(root) / w.name / name).string();
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw DataError("cannot create directory '" + dir + "': " + ec.message());
}

std::vector<TweetRecord> cached_records(const OutDir& out) {
    const std::string path = out.file("records.jsonl");
    if (!fs::exists(path))
        throw DataError("'" + path + "' not found; run ingest first");
    return parse_records_file(path, true).records;
}

InteractionGraph cached_graph(const OutDir& out, const TimeWindow& w) {
    return import_graph(out.window_file(w, "edges.csv"), out.window_file(w, "nodes.csv"), w.name);
}

std::uint64_t seed_for(const RunConfig& cfg, const std::string& what) { return cfg.seed ^ stream_id(what); }

std::map<UserId, double> sentiment_map(const std::vector<UserSentiment>& rows) {
    std::map<UserId, double> m;
    for (const auto& r : rows)
        m.emplace(r.user, r.sentiment);
    return m;
}

// A comparison, or null plus a reason when a group is too small.
json comparison_or_null(const std::string& name_a, const std::vector<double>& a, const std::string& name_b,
                        const std::vector<double>& b, const StatsConfig& cfg, std::uint64_t seed) {
    if (a.size() < 2 || b.size() < 2)
        return json{{"groups", {name_a, name_b}},
                    {"sizes", {a.size(), b.size()}},
                    {"skipped", "each group needs at least two users"}};
    return json(compare_groups(name_a, a, name_b, b, cfg, seed));
}

} // namespace

void stage_ingest(const RunConfig& cfg, const OutDir& out, const std::string& input) {
    const std::string path = input.empty() ? cfg.input : input;
    if (path.empty())
        throw ConfigError("ingest: no input file given");
    ensure_dir(out.root);
    ParseResult parsed = parse_records_file(path, cfg.strict_ingest);
    std::stable_sort(parsed.records.begin(), parsed.records.end(),
                     [](const TweetRecord& a, const TweetRecord& b) { return a.timestamp < b.timestamp; });
    write_records_file(out.file("records.jsonl"), parsed.records);

    json windows = json::object();
    for (const auto& w : cfg.windows)
        windows[w.name] = window_slice(parsed.records, w).size();
    write_json_file(out.file("parse_report.json"), json{{"report", parsed.report}, {"records_per_window", windows}});
}

void stage_build_graph(const RunConfig& cfg, const OutDir& out) {
    const auto records = cached_records(out);
    for (const auto& w : cfg.windows) {
        ensure_dir(out.file(w.name));
        const auto slice = window_slice(records, w);
        const InteractionGraph raw = build_graph(slice, w.name);
        const InteractionGraph g = filter_by_activity(raw, cfg.activity_threshold);
        export_edgelist(g, out.window_file(w, "edges.csv"));
        export_node_table(g, out.window_file(w, "nodes.csv"));
        write_json_file(out.window_file(w, "graph.json"),
                        json{{"window", w.name},
                             {"start", w.start},
                             {"end", w.end},
                             {"records", slice.size()},
                             {"activity_threshold", cfg.activity_threshold},
                             {"nodes_before_filter", raw.node_count()},
                             {"edges_before_filter", raw.edge_count()},
                             {"nodes", g.node_count()},
                             {"edges", g.edge_count()},
                             {"total_weight", g.total_weight()}});
    }
}

void stage_communities(const RunConfig& cfg, const OutDir& out) {
    for (const auto& w : cfg.windows) {
        const InteractionGraph g = cached_graph(out, w);
        McmcConfig mcmc = cfg.sbm;
        mcmc.seed = seed_for(cfg, "sbm:" + w.name);
        const Partition p = infer_partition(g, cfg.blocks, mcmc);
        const CommunityLabels labels = label_communities(p, g, cfg.anchors);
        const CommunitySnapshot snap = make_snapshot(g, p, labels);
        write_partition_csv(snap, out.window_file(w, "partition.csv"));

        json blocks = json::array();
        for (BlockId b = 0; b < p.blocks; ++b)
            blocks.push_back({{"block", b}, {"label", labels.label_of(b)}, {"size", p.block_size(b)}});
        write_json_file(out.window_file(w, "communities.json"),
                        json{{"window", w.name},
                             {"blocks", blocks},
                             {"description_length", p.description_length},
                             {"seed", p.seed},
                             {"sweeps", p.sweeps},
                             {"chain", p.chain},
                             {"anchors", labels.evidence}});
    }
}

void stage_metrics(const RunConfig& cfg, const OutDir& out) {
    for (const auto& w : cfg.windows) {
        const InteractionGraph g = cached_graph(out, w);
        write_metrics_csv(compute_metrics(g, cfg.pagerank), out.window_file(w, "metrics.csv"));
    }
}

void stage_sentiment(const RunConfig& cfg, const OutDir& out) {
    const auto records = cached_records(out);
    const SentimentLexicon lexicon = load_lexicon(cfg);
    for (const auto& w : cfg.windows) {
        ensure_dir(out.file(w.name));
        const auto slice = window_slice(records, w);
        write_sentiment_csv(aggregate_user_sentiment(slice, lexicon, cfg.rules, cfg.originals_only),
                            out.window_file(w, "sentiment.csv"));

        std::vector<csv::Row> rows;
        for (const auto& r : slice) {
            if (cfg.originals_only && r.retweeted_author_id)
                continue;
            const SentimentScore s = score_text(r.text, lexicon, cfg.rules);
            rows.push_back({r.tweet_id, r.author_id.value, csv::format_double(s.compound),
                            std::string(to_string(s.label))});
        }
        csv::write(out.window_file(w, "tweet_sentiment.csv"), {"tweet_id", "author_id", "compound", "class"}, rows);
    }
}

void stage_shift(const RunConfig& cfg, const OutDir& out) {
    const auto s1 = read_partition_csv(out.window_file(cfg.t1(), "partition.csv"), cfg.t1().name);
    const auto s2 = read_partition_csv(out.window_file(cfg.t2(), "partition.csv"), cfg.t2().name);
    const ShiftResult shifts = detect_shifters(s1, s2);
    write_shift_csv(shifts, out.file("shifts.csv"));
    write_json_file(out.file("overlap.json"), json{{"overlap", overlap_report(s1, s2)},
                                                   {"alignment", align(s1, s2)},
                                                   {"shifters", shifts.shifters()},
                                                   {"stayers", shifts.stayers()},
                                                   {"only_t1", shifts.only_t1},
                                                   {"only_t2", shifts.only_t2}});
}

void stage_stats(const RunConfig& cfg, const OutDir& out) {
    const ShiftResult shifts = read_shift_csv(out.file("shifts.csv"));
    const auto sent1 = sentiment_map(read_sentiment_csv(out.window_file(cfg.t1(), "sentiment.csv"), cfg.rules));
    const auto sent2 = sentiment_map(read_sentiment_csv(out.window_file(cfg.t2(), "sentiment.csv"), cfg.rules));
    const auto metrics_t1 = read_metrics_csv(out.window_file(cfg.t1(), "metrics.csv"));

    json result;
    json metric_rows = json::array();
    for (const auto& m : metrics_comparison(shifts.records, metrics_t1, cfg.stats, seed_for(cfg, "metrics")))
        metric_rows.push_back({{"metric", m.metric}, {"comparison", m.comparison}});
    result["metrics_comparison"] = std::move(metric_rows);

    // Community sentiment in each window, between the labeled communities.
    json community = json::object();
    for (const auto* w : {&cfg.t1(), &cfg.t2()}) {
        const auto snap = read_partition_csv(out.window_file(*w, "partition.csv"), w->name);
        const auto& sent = w == &cfg.t1() ? sent1 : sent2;
        std::map<std::string, std::vector<double>> by_label;
        for (const auto& [user, block] : snap.block) {
            auto it = sent.find(user);
            if (it != sent.end())
                by_label[snap.label_of(user)].push_back(it->second);
        }
        by_label.erase(kUnlabeled);
        json entry = json::object();
        if (by_label.size() >= 2) {
            auto a = by_label.begin();
            auto b = std::next(a);
            entry = comparison_or_null(a->first, a->second, b->first, b->second, cfg.stats,
                                       seed_for(cfg, "community:" + w->name));
        }
        community[w->name] = std::move(entry);
    }
    result["community_sentiment"] = std::move(community);

    // t1 sentiment of shifters vs stayers within each t1 community.
    json by_status = json::object();
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : shifts.records) {
        auto it = sent1.find(r.user);
        if (it == sent1.end())
            continue;
        auto& g = groups[r.label_t1];
        (r.is_shifter ? g.first : g.second).push_back(it->second);
    }
    for (const auto& [label, g] : groups)
        by_status[label] = comparison_or_null(kShifterGroup, g.first, kStayerGroup, g.second, cfg.stats,
                                              seed_for(cfg, "t1_by_status:" + label));
    result["sentiment_t1_comparison"] = std::move(by_status);

    const DeltaMatrix delta = delta_sentiment_matrix(shifts.records, sent1, sent2, cfg.stats, seed_for(cfg, "delta"));
    result["delta_matrix"] = delta;

    std::vector<double> d_shift, d_stay;
    for (const auto& [key, values] : delta.deltas) {
        auto& dst = key.first != key.second ? d_shift : d_stay;
        dst.insert(dst.end(), values.begin(), values.end());
    }
    result["delta_shifters_vs_stayers"] =
        comparison_or_null(kShifterGroup, d_shift, kStayerGroup, d_stay, cfg.stats, seed_for(cfg, "delta_groups"));
    result["alpha"] = cfg.stats.alpha;
    result["seed"] = cfg.seed;
    write_json_file(out.file("stats.json"), result);
}

void stage_report(const RunConfig& cfg, const OutDir& out) {
    const json stats = read_json_file(out.file("stats.json"));
    const json overlap = read_json_file(out.file("overlap.json"));
    ensure_dir(out.file("histograms"));

    json report;
    report["sources"] = {{"overlap", "overlap.json#/overlap"},
                         {"metrics_comparison", "stats.json#/metrics_comparison"},
                         {"sentiment_t1_comparison", "stats.json#/sentiment_t1_comparison"},
                         {"community_sentiment", "stats.json#/community_sentiment"},
                         {"delta_matrix", "stats.json#/delta_matrix"},
                         {"populations", "<window>/partition.csv"},
                         {"alignment_pct", "<window>/partition.csv, <window>/sentiment.csv"},
                         {"histograms", "<window>/partition.csv, <window>/tweet_sentiment.csv"}};
    report["overlap"] = overlap.at("overlap");
    report["shifters"] = overlap.at("shifters");
    report["stayers"] = overlap.at("stayers");
    report["metrics_comparison"] = stats.at("metrics_comparison");
    report["sentiment_t1_comparison"] = stats.at("sentiment_t1_comparison");
    report["community_sentiment"] = stats.at("community_sentiment");
    report["delta_matrix"] = stats.at("delta_matrix");

    json populations = json::object(), alignment = json::object(), histograms = json::array();
    for (const auto& w : cfg.windows) {
        const auto snap = read_partition_csv(out.window_file(w, "partition.csv"), w.name);
        const auto sentiments = read_sentiment_csv(out.window_file(w, "sentiment.csv"), cfg.rules);

        json pop = json::object();
        std::map<std::string, std::size_t> counts;
        for (const auto& [user, block] : snap.block)
            ++counts[snap.label_of(user)];
        for (const auto& [label, c] : counts)
            pop[label] = c;
        pop["total"] = snap.size();
        populations[w.name] = std::move(pop);

        json shares = json::object();
        for (const auto& [label, share] : alignment_pct(snap, sentiments, cfg.polarity))
            shares[label] = {{"expected", share.expected},
                             {"members", share.members},
                             {"aligned", share.aligned},
                             {"fraction", share.fraction}};
        alignment[w.name] = std::move(shares);

        const csv::Table tweets = csv::read(out.window_file(w, "tweet_sentiment.csv"));
        const auto ca = tweets.column("author_id"), cc = tweets.column("compound");
        std::map<std::string, std::vector<double>> by_label;
        for (const auto& [label, c] : counts)
            by_label[label];
        for (const auto& row : tweets.rows) {
            const UserId author{row[ca]};
            if (!snap.block.count(author))
                continue;
            by_label[snap.label_of(author)].push_back(csv::parse_double(row[cc], "compound"));
        }
        for (const auto& [label, values] : by_label) {
            const std::string name = w.name + "_" + label + ".csv";
            histogram_export(values, cfg.histogram_bins, (fs::path(out.file("histograms")) / name).string());
            histograms.push_back(
                {{"window", w.name}, {"label", label}, {"file", "histograms/" + name}, {"tweets", values.size()}});
        }
    }
    report["populations"] = std::move(populations);
    report["alignment_pct"] = std::move(alignment);
    report["histograms"] = std::move(histograms);
    write_json_file(out.file("report.json"), report);
}

void stage_plot(const OutDir& out) {
    const fs::path dir = out.file("histograms");
    if (!fs::is_directory(dir))
        throw DataError("'" + dir.string() + "' not found; run report first");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto svg = f;
        svg.replace_extension(".svg");
        write_histogram_svg(read_histogram_csv(f.string()), "Sentiment of tweets: " + f.stem().string(),
                            svg.string());
    }
}

void run_pipeline(const RunConfig& cfg, const OutDir& out, const std::string& input) {
    validate_config(cfg);
    ensure_dir(out.root);
    write_json_file(out.file("run_config.json"), config_to_json(cfg));
    stage_ingest(cfg, out, input);
    stage_build_graph(cfg, out);
    stage_communities(cfg, out);
    stage_metrics(cfg, out);
    stage_sentiment(cfg, out);
    stage_shift(cfg, out);
    stage_stats(cfg, out);
    stage_report(cfg, out);
    stage_plot(out);
}

} // namespace polarshift
