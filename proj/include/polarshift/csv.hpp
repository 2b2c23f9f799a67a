#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace polarshift::csv {

using Row = std::vector<std::string>;

/// Header plus data rows. Quoted fields follow RFC 4180 (doubled quotes).
struct Table {
    Row header;
    std::vector<Row> rows;

    /// Index of a header column; throws DataError if absent.
    std::size_t column(std::string_view name) const;
};

/// Reads a whole CSV file. Throws DataError on I/O failure or ragged rows.
Table read(const std::string& path);

/// Writes atomically enough for our purposes: truncate, write, check stream.
void write(const std::string& path, const Row& header, const std::vector<Row>& rows);

std::string escape(std::string_view field);

/// Round-trippable decimal form of a double ("%.17g").
std::string format_double(double v);

double parse_double(const std::string& s, std::string_view what);
long long parse_int(const std::string& s, std::string_view what);

} // namespace polarshift::csv
