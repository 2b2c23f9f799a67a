#include "polarshift/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "polarshift/csv.hpp"

namespace polarshift {

std::vector<MetricComparison> metrics_comparison(const std::vector<ShiftRecord>& shifts,
                                                 const std::vector<UserMetrics>& metrics_t1, const StatsConfig& cfg,
                                                 std::uint64_t seed) {
    std::unordered_map<UserId, const UserMetrics*> by_user;
    for (const auto& m : metrics_t1)
        by_user.emplace(m.user, &m);

    struct Columns {
        std::vector<double> in, out, pr, bc;
    } shifters, stayers;
    for (const auto& r : shifts) {
        auto it = by_user.find(r.user);
        if (it == by_user.end())
            continue;
        Columns& c = r.is_shifter ? shifters : stayers;
        c.in.push_back(static_cast<double>(it->second->in_degree));
        c.out.push_back(static_cast<double>(it->second->out_degree));
        c.pr.push_back(it->second->pagerank);
        c.bc.push_back(it->second->betweenness);
    }
    if (shifters.in.size() < 2)
        throw DataError(std::string("metrics_comparison: class ") + kShifterGroup + " has " +
                        std::to_string(shifters.in.size()) + " users with t1 metrics (need 2)");
    if (stayers.in.size() < 2)
        throw DataError(std::string("metrics_comparison: class ") + kStayerGroup + " has " +
                        std::to_string(stayers.in.size()) + " users with t1 metrics (need 2)");

    std::vector<MetricComparison> out;
    auto add = [&](const char* name, const std::vector<double>& a, const std::vector<double>& b) {
        out.push_back({name, compare_groups(kShifterGroup, a, kStayerGroup, b, cfg, seed ^ stream_id(name))});
    };
    add("in_degree", shifters.in, stayers.in);
    add("out_degree", shifters.out, stayers.out);
    add("pagerank", shifters.pr, stayers.pr);
    add("betweenness", shifters.bc, stayers.bc);
    return out;
}

std::map<std::string, AlignmentShare> alignment_pct(const CommunitySnapshot& snapshot,
                                                    const std::vector<UserSentiment>& sentiments,
                                                    const PolarityMap& polarity) {
    std::map<std::string, AlignmentShare> out;
    for (const auto& [label, expected] : polarity)
        out[label].expected = std::string(to_string(expected));

    for (const auto& s : sentiments) {
        auto b = snapshot.block.find(s.user);
        if (b == snapshot.block.end())
            continue;
        const std::string& label = snapshot.label_of(s.user);
        auto pol = polarity.find(label);
        if (pol == polarity.end())
            continue;
        AlignmentShare& share = out[label];
        ++share.members;
        if (s.label == pol->second)
            ++share.aligned;
    }
    for (auto& [label, share] : out) {
        if (share.members == 0)
            throw DataError("alignment_pct: community '" + label + "' has no member with a sentiment score in " +
                            snapshot.window);
        share.fraction = static_cast<double>(share.aligned) / static_cast<double>(share.members);
    }
    return out;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
    if (bins == 0)
        throw ConfigError("histogram: bins must be at least 1");
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        edges[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(bins);
    edges[bins] = 1.0;

    std::vector<HistogramBin> out(bins);
    for (std::size_t i = 0; i < bins; ++i)
        out[i] = {edges[i], edges[i + 1], 0};
    for (double v : values) {
        if (!(v >= -1.0 && v <= 1.0))
            throw DataError("histogram: value outside [-1, 1]");
        auto guess = static_cast<std::size_t>((v + 1.0) / 2.0 * static_cast<double>(bins));
        guess = std::min(guess, bins - 1);
        // The estimate can be one off near an edge; settle against the
        // exported edges.
        while (guess > 0 && v < edges[guess])
            --guess;
        while (guess + 1 < bins && v >= edges[guess + 1])
            ++guess;
        ++out[guess].count;
    }
    return out;
}

void histogram_export(std::span<const double> values, std::size_t bins, const std::string& path) {
    const auto h = histogram(values, bins);
    std::vector<csv::Row> rows;
    rows.reserve(h.size());
    for (const auto& b : h)
        rows.push_back({csv::format_double(b.left), csv::format_double(b.right), std::to_string(b.count)});
    csv::write(path, {"bin_left", "bin_right", "count"}, rows);
}

std::vector<HistogramBin> read_histogram_csv(const std::string& path) {
    const csv::Table t = csv::read(path);
    const std::size_t cl = t.column("bin_left"), cr = t.column("bin_right"), cc = t.column("count");
    std::vector<HistogramBin> out;
    for (const auto& r : t.rows) {
        const auto count = csv::parse_int(r[cc], "count");
        if (count < 0)
            throw DataError(path + ": negative count");
        out.push_back({csv::parse_double(r[cl], "bin_left"), csv::parse_double(r[cr], "bin_right"),
                       static_cast<std::size_t>(count)});
    }
    return out;
}

void write_histogram_svg(const std::vector<HistogramBin>& bins, const std::string& title, const std::string& path) {
    constexpr double width = 640, height = 360, margin = 40;
    std::size_t peak = 1;
    for (const auto& b : bins)
        peak = std::max(peak, b.count);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write '" + path + "'");
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  width, height, width, height);
    out << buf;
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::string safe_title;
    for (char c : title) {
        if (c == '<')
            safe_title += "&lt;";
        else if (c == '>')
            safe_title += "&gt;";
        else if (c == '&')
            safe_title += "&amp;";
        else
            safe_title += c;
    }
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << safe_title << "</text>\n";

    const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
    const double bar_w = bins.empty() ? 0.0 : plot_w / static_cast<double>(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double h = plot_h * static_cast<double>(bins[i].count) / static_cast<double>(peak);
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#4a6fa5\" stroke=\"white\"/>\n",
                      margin + bar_w * static_cast<double>(i), margin + plot_h - h, bar_w, h);
        out << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"black\"/>\n"
                  "<text x=\"%.0f\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"11\">-1</text>\n"
                  "<text x=\"%.0f\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1</text>\n"
                  "<text x=\"5\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"11\">%zu</text>\n",
                  margin, margin + plot_h, margin + plot_w, margin + plot_h, margin, height - margin + 15,
                  margin + plot_w, height - margin + 15, margin + 4, peak);
    out << buf << "</svg>\n";
    if (!out)
        throw DataError("write failed for '" + path + "'");
}

} // namespace polarshift
