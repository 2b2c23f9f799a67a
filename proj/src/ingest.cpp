#include "polarshift/ingest.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

namespace polarshift {

using nlohmann::json;

ParseReport& ParseReport::operator+=(const ParseReport& other) noexcept {
    lines += other.lines;
    accepted += other.accepted;
    blank += other.blank;
    malformed += other.malformed;
    missing_field += other.missing_field;
    self_retweet += other.self_retweet;
    duplicate_id += other.duplicate_id;
    return *this;
}

// Accepts "YYYY-MM-DDTHH:MM:SSZ" (or a "+00:00" suffix). Other offsets are
// rejected rather than silently shifted.
std::optional<std::int64_t> parse_iso_utc(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char tail[8] = {};
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%7s", &y, &mo, &d, &h, &mi, &sec, tail) != 7)
        return std::nullopt;
    const std::string suffix(tail);
    if (suffix != "Z" && suffix != "+00:00")
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60)
        return std::nullopt;
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return std::int64_t{days} * 86400 + h * 3600 + mi * 60 + sec;
}

namespace {

enum class LineStatus { ok, blank, malformed, missing_field, self_retweet };

struct LineOutcome {
    LineStatus status = LineStatus::ok;
    std::string detail;
};

std::optional<std::string> id_field(const json& j) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s.empty())
            return std::nullopt;
        return s;
    }
    if (j.is_number_integer())
        return std::to_string(j.get<std::int64_t>());
    return std::nullopt;
}

LineOutcome parse_line(const std::string& line, TweetRecord& out) {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
        return {LineStatus::blank, {}};

    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return {LineStatus::malformed, "not a JSON object"};

    for (const char* key : {"tweet_id", "author_id", "author_handle", "timestamp", "text"}) {
        if (!j.contains(key) || j[key].is_null())
            return {LineStatus::missing_field, std::string("missing field '") + key + "'"};
    }

    auto tweet_id = id_field(j["tweet_id"]);
    auto author = id_field(j["author_id"]);
    if (!tweet_id || !author)
        return {LineStatus::malformed, "tweet_id/author_id must be a non-empty string or integer"};
    if (!j["author_handle"].is_string() || !j["text"].is_string())
        return {LineStatus::malformed, "author_handle/text must be strings"};

    const json& ts = j["timestamp"];
    std::optional<std::int64_t> timestamp;
    if (ts.is_number_integer())
        timestamp = ts.get<std::int64_t>();
    else if (ts.is_string())
        timestamp = parse_iso_utc(ts.get<std::string>());
    if (!timestamp)
        return {LineStatus::malformed, "timestamp must be integer epoch seconds or ISO-8601 UTC"};

    TweetRecord rec;
    rec.tweet_id = std::move(*tweet_id);
    rec.author_id = UserId(std::move(*author));
    rec.author_handle = j["author_handle"].get<std::string>();
    rec.timestamp = *timestamp;
    rec.text = j["text"].get<std::string>();

    if (j.contains("retweeted_author_id") && !j["retweeted_author_id"].is_null()) {
        auto original = id_field(j["retweeted_author_id"]);
        if (!original)
            return {LineStatus::malformed, "retweeted_author_id must be a non-empty string or integer"};
        rec.retweeted_author_id = UserId(std::move(*original));
        if (j.contains("retweeted_author_handle") && j["retweeted_author_handle"].is_string())
            rec.retweeted_author_handle = j["retweeted_author_handle"].get<std::string>();
        if (*rec.retweeted_author_id == rec.author_id)
            return {LineStatus::self_retweet, {}};
    }

    out = std::move(rec);
    return {};
}

} // namespace

ParseResult parse_records(std::istream& in, bool strict) {
    ParseResult result;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        ++result.report.lines;
        TweetRecord rec;
        LineOutcome outcome = parse_line(line, rec);
        if (outcome.status == LineStatus::ok && !seen_ids.insert(rec.tweet_id).second) {
            ++result.report.duplicate_id;
            if (strict)
                throw DataError("line " + std::to_string(line_no) + ": duplicate tweet_id '" + rec.tweet_id + "'");
            continue;
        }
        switch (outcome.status) {
        case LineStatus::ok:
            ++result.report.accepted;
            result.records.push_back(std::move(rec));
            break;
        case LineStatus::blank:
            ++result.report.blank;
            break;
        case LineStatus::self_retweet:
            ++result.report.self_retweet;
            break;
        case LineStatus::malformed:
        case LineStatus::missing_field:
            if (strict)
                throw DataError("line " + std::to_string(line_no) + ": " + outcome.detail);
            if (outcome.status == LineStatus::malformed)
                ++result.report.malformed;
            else
                ++result.report.missing_field;
            break;
        }
    }
    return result;
}

ParseResult parse_records_file(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open records file '" + path + "'");
    try {
        return parse_records(in, strict);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::string serialize_record(const TweetRecord& record) {
    json j;
    j["tweet_id"] = record.tweet_id;
    j["author_id"] = record.author_id.value;
    j["author_handle"] = record.author_handle;
    j["timestamp"] = record.timestamp;
    j["text"] = record.text;
    if (record.retweeted_author_id) {
        j["retweeted_author_id"] = record.retweeted_author_id->value;
        if (record.retweeted_author_handle)
            j["retweeted_author_handle"] = *record.retweeted_author_handle;
    }
    return j.dump();
}

void write_records(std::ostream& out, std::span<const TweetRecord> records) {
    for (const auto& r : records)
        out << serialize_record(r) << '\n';
}

void write_records_file(const std::string& path, std::span<const TweetRecord> records) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write records file '" + path + "'");
    write_records(out, records);
    if (!out)
        throw DataError("write failed for '" + path + "'");
}

std::vector<TweetRecord> window_slice(std::span<const TweetRecord> records, const TimeWindow& window) {
    std::vector<TweetRecord> out;
    for (const auto& r : records)
        if (window.contains(r.timestamp))
            out.push_back(r);
    return out;
}

void validate_windows(std::span<const TimeWindow> windows) {
    std::unordered_set<std::string> names;
    for (const auto& w : windows) {
        if (w.name.empty())
            throw ConfigError("time window with empty name");
        if (!(w.start < w.end))
            throw ConfigError("time window '" + w.name + "' must have start < end");
        if (!names.insert(w.name).second)
            throw ConfigError("duplicate time window name '" + w.name + "'");
    }
}

} // namespace polarshift
