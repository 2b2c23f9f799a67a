#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "polarshift/pipeline.hpp"
#include "polarshift/synth.hpp"

using namespace polarshift;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

RunConfig load(const Globals& g) {
    if (g.config.empty())
        throw ConfigError("--config is required for this subcommand");
    RunConfig cfg = load_config(g.config);
    if (g.seed)
        cfg.seed = *g.seed;
    validate_config(cfg);
    return cfg;
}

OutDir out_dir(const Globals& g) {
    if (g.out_dir.empty())
        throw ConfigError("--out-dir is required");
    return OutDir{g.out_dir};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Community shift analysis of two-window retweet networks"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "Run configuration (JSON)");
    app.add_option("--seed", g.seed, "Override the configured seed");
    app.add_option("--out-dir", g.out_dir, "Output directory");

    std::string input;
    bool originals_only = false;
    SynthOptions synth_opts;

    auto* ingest = app.add_subcommand("ingest", "Parse and normalise tweet records");
    ingest->add_option("--input", input, "Records file (JSONL); defaults to the configured input");
    app.add_subcommand("build-graph", "Build and filter the retweet graph of each window");
    app.add_subcommand("communities", "Infer and label communities in each window");
    app.add_subcommand("metrics", "Degree, PageRank and betweenness per user");
    auto* sentiment = app.add_subcommand("sentiment", "Score tweets and average per user");
    sentiment->add_flag("--originals-only", originals_only, "Ignore retweets when averaging");
    app.add_subcommand("shift", "Find users whose community changed");
    app.add_subcommand("stats", "Bootstrap summaries and nonparametric tests");
    app.add_subcommand("report", "Assemble tables, alignment shares and histograms");
    app.add_subcommand("plot", "Render histogram CSVs as SVG charts");
    auto* pipeline = app.add_subcommand("pipeline", "Run every stage");
    pipeline->add_option("--input", input, "Records file (JSONL); defaults to the configured input");
    auto* synth = app.add_subcommand("synth", "Write a synthetic two-window dataset");
    synth->add_option("--users", synth_opts.users, "Number of users")->capture_default_str();
    synth->add_option("--movers", synth_opts.movers, "Planted community movers")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "synth") {
            if (g.seed)
                synth_opts.seed = *g.seed;
            write_synthetic(make_synthetic(synth_opts), out_dir(g).root);
        } else if (cmd == "plot") {
            stage_plot(out_dir(g));
        } else {
            RunConfig cfg = load(g);
            if (originals_only)
                cfg.originals_only = true;
            const OutDir out = out_dir(g);
            if (cmd == "ingest")
                stage_ingest(cfg, out, input);
            else if (cmd == "build-graph")
                stage_build_graph(cfg, out);
            else if (cmd == "communities")
                stage_communities(cfg, out);
            else if (cmd == "metrics")
                stage_metrics(cfg, out);
            else if (cmd == "sentiment")
                stage_sentiment(cfg, out);
            else if (cmd == "shift")
                stage_shift(cfg, out);
            else if (cmd == "stats")
                stage_stats(cfg, out);
            else if (cmd == "report")
                stage_report(cfg, out);
            else if (cmd == "pipeline")
                run_pipeline(cfg, out, input);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConvergenceError& e) {
        std::cerr << "did not converge: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitConvergence;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
