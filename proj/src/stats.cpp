#include "polarshift/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

namespace polarshift {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

std::uint64_t stream_id(std::string_view name) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

BootstrapSummary bootstrap_mean(std::span<const double> data, std::size_t iterations, std::uint64_t seed,
                                double subsample_fraction) {
    if (data.empty())
        throw DataError("bootstrap_mean: empty data");
    if (iterations == 0)
        throw ConfigError("bootstrap_mean: iterations must be positive");
    if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0))
        throw ConfigError("bootstrap_mean: subsample_fraction must be in (0, 1]");

    BootstrapSummary s;
    s.iterations = iterations;
    s.seed = seed;
    s.sample_size = data.size();
    s.resample_size =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(subsample_fraction * data.size())));

    double sum = 0.0;
    for (double v : data)
        sum += v;
    s.raw_mean = sum / static_cast<double>(data.size());
    double ss = 0.0;
    for (double v : data)
        ss += (v - s.raw_mean) * (v - s.raw_mean);
    s.raw_std = std::sqrt(ss / static_cast<double>(data.size()));

    auto rng = make_stream(seed, 0);
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    std::vector<double> means(iterations);
    for (double& m : means) {
        double acc = 0.0;
        for (std::size_t k = 0; k < s.resample_size; ++k)
            acc += data[pick(rng)];
        m = acc / static_cast<double>(s.resample_size);
    }
    double msum = 0.0;
    for (double m : means)
        msum += m;
    s.mean_of_means = msum / static_cast<double>(iterations);
    double mss = 0.0;
    for (double m : means)
        mss += (m - s.mean_of_means) * (m - s.mean_of_means);
    s.std_of_means = std::sqrt(mss / static_cast<double>(iterations));
    return s;
}

std::string_view to_string(TestMethod m) {
    switch (m) {
    case TestMethod::mann_whitney_u_exact:
        return "mann_whitney_u_exact";
    case TestMethod::mann_whitney_u_normal:
        return "mann_whitney_u_normal";
    case TestMethod::kruskal_wallis_chi2:
        return "kruskal_wallis_chi2";
    }
    return "unknown";
}

std::vector<double> midranks(std::span<const double> pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(pooled.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && pooled[order[j]] == pooled[order[i]])
            ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            ranks[order[k]] = mid;
        i = j;
    }
    return ranks;
}

namespace {

// Tie group sizes of the pooled sample, in increasing value order.
std::vector<std::size_t> tie_groups(std::span<const double> pooled) {
    std::vector<double> sorted(pooled.begin(), pooled.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> groups;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        groups.push_back(j - i);
        i = j;
    }
    return groups;
}

double tie_sum(const std::vector<std::size_t>& groups) {
    double t = 0.0;
    for (std::size_t g : groups) {
        const double d = static_cast<double>(g);
        t += d * d * d - d;
    }
    return t;
}

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw DataError(std::string(what) + ": non-finite observation");
}

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    unsigned __int128 c = 1;
    for (std::uint64_t i = 0; i < k; ++i)
        c = c * (n - i) / (i + 1);
    return static_cast<std::uint64_t>(c);
}

// Two-sided p from the permutation distribution of the doubled rank sum of
// a group of size n drawn from the pooled tie groups.
double exact_rank_sum_p(const std::vector<std::size_t>& groups, std::size_t n, std::uint64_t observed2) {
    // Doubled midrank of each tie group: (first + last) for 1-based ranks.
    std::vector<std::uint64_t> rank2;
    std::size_t pos = 0;
    for (std::size_t g : groups) {
        rank2.push_back(static_cast<std::uint64_t>(2 * pos + 1 + g));
        pos += g;
    }
    const std::uint64_t max_sum = static_cast<std::uint64_t>(2 * n * pos + 1);
    // counts[k][s]: labelings with k members and doubled rank sum s.
    std::vector<std::vector<std::uint64_t>> counts(n + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
    counts[0][0] = 1;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const std::size_t t = groups[gi];
        std::vector<std::vector<std::uint64_t>> next(n + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
        for (std::size_t k = 0; k <= n; ++k) {
            for (std::uint64_t s = 0; s <= max_sum; ++s) {
                const std::uint64_t c = counts[k][s];
                if (!c)
                    continue;
                for (std::size_t a = 0; a <= t && k + a <= n; ++a) {
                    next[k + a][s + a * rank2[gi]] += c * choose(t, a);
                }
            }
        }
        counts.swap(next);
    }
    std::uint64_t total = 0, le = 0, ge = 0;
    for (std::uint64_t s = 0; s <= max_sum; ++s) {
        const std::uint64_t c = counts[n][s];
        total += c;
        if (s <= observed2)
            le += c;
        if (s >= observed2)
            ge += c;
    }
    return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

} // namespace

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y, std::size_t exact_cutoff) {
    if (x.empty() || y.empty())
        throw DataError("mann_whitney_u: both samples must be nonempty");
    if (exact_cutoff > 30)
        throw ConfigError("mann_whitney_u: exact_cutoff above 30 would overflow the permutation counts");
    check_finite(x, "mann_whitney_u");
    check_finite(y, "mann_whitney_u");

    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const std::vector<double> ranks = midranks(pooled);
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    const double N = n + m;
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        rank_sum += ranks[i];
    const double U = rank_sum - n * (n + 1.0) / 2.0;

    const auto groups = tie_groups(pooled);
    const bool ties = groups.size() < pooled.size();
    const double T = tie_sum(groups);
    const double var = n * m / 12.0 * ((N + 1.0) - T / (N * (N - 1.0)));
    const double mu = n * m / 2.0;

    TestResult r;
    r.statistic = U;
    r.n_per_group = {x.size(), y.size()};
    r.z = var > 0.0 ? (U - mu) / std::sqrt(var) : 0.0;

    if (x.size() <= exact_cutoff && y.size() <= exact_cutoff) {
        r.method = TestMethod::mann_whitney_u_exact;
        r.tie_correction_applied = false;
        r.p_value = exact_rank_sum_p(groups, x.size(), static_cast<std::uint64_t>(std::llround(2.0 * rank_sum)));
        return r;
    }

    r.method = TestMethod::mann_whitney_u_normal;
    r.tie_correction_applied = ties;
    if (var <= 0.0) {
        r.p_value = 1.0;
        return r;
    }
    const double z = (std::abs(U - mu) - 0.5) / std::sqrt(var);
    r.p_value = z <= 0.0 ? 1.0 : std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return r;
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2)
        throw DataError("kruskal_wallis: need at least two groups");
    std::vector<double> pooled;
    TestResult r;
    r.method = TestMethod::kruskal_wallis_chi2;
    for (const auto& g : groups) {
        if (g.empty())
            throw DataError("kruskal_wallis: empty group");
        check_finite(g, "kruskal_wallis");
        pooled.insert(pooled.end(), g.begin(), g.end());
        r.n_per_group.push_back(g.size());
    }
    const std::vector<double> ranks = midranks(pooled);
    const double N = static_cast<double>(pooled.size());

    double between = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            sum += ranks[offset + i];
        between += sum * sum / static_cast<double>(g.size());
        offset += g.size();
    }
    const double H0 = 12.0 / (N * (N + 1.0)) * between - 3.0 * (N + 1.0);

    const auto tg = tie_groups(pooled);
    r.tie_correction_applied = tg.size() < pooled.size();
    const double correction = 1.0 - tie_sum(tg) / (N * N * N - N);
    if (correction <= 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    const double H = std::max(0.0, H0 / correction);
    r.statistic = H;
    const double df = static_cast<double>(groups.size() - 1);
    r.p_value = H == 0.0 ? 1.0 : std::clamp(boost::math::gamma_q(df / 2.0, H / 2.0), 0.0, 1.0);
    return r;
}

GroupComparison compare_groups(std::string name_a, std::span<const double> a, std::string name_b,
                               std::span<const double> b, const StatsConfig& cfg, std::uint64_t seed) {
    GroupComparison c;
    c.name_a = std::move(name_a);
    c.name_b = std::move(name_b);
    c.a = bootstrap_mean(a, cfg.bootstrap_iterations, seed ^ stream_id(c.name_a), cfg.subsample_fraction);
    c.b = bootstrap_mean(b, cfg.bootstrap_iterations, seed ^ stream_id(c.name_b), cfg.subsample_fraction);
    c.mwu = mann_whitney_u(a, b, cfg.exact_cutoff);
    c.kw = kruskal_wallis({std::vector<double>(a.begin(), a.end()), std::vector<double>(b.begin(), b.end())});
    c.significant = c.mwu.p_value < cfg.alpha && c.kw.p_value < cfg.alpha;
    return c;
}

const std::optional<BootstrapSummary>& DeltaMatrix::cell(const std::string& t1, const std::string& t2) const {
    static const std::optional<BootstrapSummary> none;
    auto it = cells.find({t1, t2});
    return it == cells.end() ? none : it->second;
}

DeltaMatrix delta_sentiment_matrix(const std::vector<ShiftRecord>& shifts,
                                   const std::map<UserId, double>& sentiment_t1,
                                   const std::map<UserId, double>& sentiment_t2, const StatsConfig& cfg,
                                   std::uint64_t seed) {
    DeltaMatrix m;
    std::set<std::string> labels;
    for (const auto& r : shifts) {
        labels.insert(r.label_t1);
        labels.insert(r.label_t2);
    }
    m.labels.assign(labels.begin(), labels.end());
    for (const auto& a : m.labels)
        for (const auto& b : m.labels)
            m.deltas[{a, b}];

    for (const auto& r : shifts) {
        auto i1 = sentiment_t1.find(r.user);
        auto i2 = sentiment_t2.find(r.user);
        if (i1 == sentiment_t1.end() || i2 == sentiment_t2.end()) {
            ++m.missing_sentiment;
            continue;
        }
        m.deltas[{r.label_t1, r.label_t2}].push_back(i2->second - i1->second);
    }
    for (const auto& [key, values] : m.deltas) {
        if (values.empty()) {
            m.cells[key] = std::nullopt;
            continue;
        }
        const std::uint64_t cell_seed = seed ^ stream_id("delta:" + key.first + "->" + key.second);
        m.cells[key] = bootstrap_mean(values, cfg.bootstrap_iterations, cell_seed, cfg.subsample_fraction);
    }
    return m;
}

} // namespace polarshift
