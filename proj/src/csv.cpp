#include "polarshift/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polarshift/types.hpp"

namespace polarshift::csv {

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw DataError("CSV is missing column '" + std::string(name) + "'");
}

namespace {

Row split_line(const std::string& line) {
    Row out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

} // namespace

Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open CSV '" + path + "'");
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw DataError("CSV '" + path + "' has no header");
    t.header = split_line(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        Row row = split_line(line);
        if (row.size() != t.header.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(t.header.size()) + " fields, got " + std::to_string(row.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write(const std::string& path, const Row& header, const std::vector<Row>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write CSV '" + path + "'");
    auto emit = [&out](const Row& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i)
                out << ',';
            out << escape(r[i]);
        }
        out << '\n';
    };
    emit(header);
    for (const auto& r : rows)
        emit(r);
    if (!out)
        throw DataError("write failed for CSV '" + path + "'");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, std::string_view what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    } catch (const std::exception&) {
    }
    throw DataError("invalid number '" + s + "' for " + std::string(what));
}

long long parse_int(const std::string& s, std::string_view what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError("invalid integer '" + s + "' for " + std::string(what));
    return v;
}

} // namespace polarshift::csv
