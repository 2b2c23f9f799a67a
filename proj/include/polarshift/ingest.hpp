#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polarshift/types.hpp"

namespace polarshift {

/// One tweet or retweet event.
struct TweetRecord {
    std::string tweet_id;
    UserId author_id;
    std::string author_handle;
    std::int64_t timestamp = 0; ///< UTC epoch seconds
    std::string text;
    std::optional<UserId> retweeted_author_id;
    std::optional<std::string> retweeted_author_handle;

    bool is_retweet() const noexcept { return retweeted_author_id.has_value(); }
    bool operator==(const TweetRecord&) const = default;
};

/// Half-open interval [start, end) in UTC epoch seconds.
struct TimeWindow {
    std::string name;
    std::int64_t start = 0;
    std::int64_t end = 0;

    bool contains(std::int64_t ts) const noexcept { return start <= ts && ts < end; }
};

/// Counts of dropped lines by reason. Merging is an associative sum.
struct ParseReport {
    std::size_t lines = 0;
    std::size_t accepted = 0;
    std::size_t blank = 0;
    std::size_t malformed = 0;
    std::size_t missing_field = 0;
    std::size_t self_retweet = 0;
    std::size_t duplicate_id = 0;

    ParseReport& operator+=(const ParseReport& other) noexcept;
    bool operator==(const ParseReport&) const = default;
};

struct ParseResult {
    std::vector<TweetRecord> records;
    ParseReport report;
};

/// Reads newline-delimited JSON records. In strict mode the first bad line
/// throws DataError naming its 1-based line number; in lenient mode bad
/// lines are skipped and counted. Self-retweets are always dropped and
/// counted, never fatal.
ParseResult parse_records(std::istream& in, bool strict);
ParseResult parse_records_file(const std::string& path, bool strict);

/// Single-line JSON encoding accepted by parse_records.
std::string serialize_record(const TweetRecord& record);
void write_records(std::ostream& out, std::span<const TweetRecord> records);
void write_records_file(const std::string& path, std::span<const TweetRecord> records);

/// Records with window.start <= timestamp < window.end, input order kept.
std::vector<TweetRecord> window_slice(std::span<const TweetRecord> records,
                                      const TimeWindow& window);

/// "YYYY-MM-DDTHH:MM:SSZ" or a "+00:00" suffix to epoch seconds.
std::optional<std::int64_t> parse_iso_utc(const std::string& s);

/// Throws ConfigError unless every window has start < end and names are unique.
void validate_windows(std::span<const TimeWindow> windows);

} // namespace polarshift
