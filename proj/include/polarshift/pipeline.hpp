#pragma once

#include <string>

#include "polarshift/config.hpp"

namespace polarshift {

/// Output directory layout. Every stage reads what earlier stages wrote, so
/// any stage can be rerun on its own against cached artifacts.
///
///   records.jsonl, parse_report.json             ingest
///   <w>/edges.csv, <w>/nodes.csv, <w>/graph.json build-graph
///   <w>/partition.csv, <w>/communities.json       communities
///   <w>/metrics.csv                               metrics
///   <w>/sentiment.csv, <w>/tweet_sentiment.csv    sentiment
///   shifts.csv, overlap.json                      shift
///   stats.json                                    stats
///   report.json, histograms/*.csv                 report
///   histograms/*.svg                              plot
struct OutDir {
    std::string root;

    std::string file(const std::string& name) const;
    std::string window_file(const TimeWindow& w, const std::string& name) const;
};

/// input empty means cfg.input.
void stage_ingest(const RunConfig& cfg, const OutDir& out, const std::string& input = {});
void stage_build_graph(const RunConfig& cfg, const OutDir& out);
void stage_communities(const RunConfig& cfg, const OutDir& out);
void stage_metrics(const RunConfig& cfg, const OutDir& out);
void stage_sentiment(const RunConfig& cfg, const OutDir& out);
void stage_shift(const RunConfig& cfg, const OutDir& out);
void stage_stats(const RunConfig& cfg, const OutDir& out);
void stage_report(const RunConfig& cfg, const OutDir& out);
/// Renders every histograms/*.csv to an SVG next to it.
void stage_plot(const OutDir& out);

/// All stages in order. Output carries no timestamps or host details, so
/// equal inputs and seeds give byte-identical directories.
void run_pipeline(const RunConfig& cfg, const OutDir& out, const std::string& input = {});

} // namespace polarshift
