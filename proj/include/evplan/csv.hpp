#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace evplan::csv {

/// Shortest round-trip decimal form of a double ("0.047", "100", "6.5e-05").
/// Every CSV the toolkit writes goes through this, so identical data always
/// serializes to identical bytes.
inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("csv: number formatting failed");
    return std::string(buf, ptr);
}

inline double parse_number(std::string_view s, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error(where + ": not a number: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV and checks the header verbatim. Error messages carry
/// the 1-based line number of the offending row.
inline Table read_table(const std::filesystem::path& path,
                        const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ": empty file");
    t.header = split_line(line);
    if (!expected_header.empty() && t.header != expected_header) {
        std::ostringstream os;
        os << path.string() << ":1: bad header, expected '";
        for (size_t i = 0; i < expected_header.size(); ++i)
            os << (i ? "," : "") << expected_header[i];
        os << "' got '" << line << "'";
        throw std::runtime_error(os.str());
    }
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line);
        if (fields.size() != t.header.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(t.header.size()) +
                                     " fields, got " + std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields)
            row.push_back(parse_number(f, path.string() + ":" + std::to_string(lineno)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
    }

    void header(const std::vector<std::string>& names) { write_strings(names); }

    void row(const std::vector<double>& values) {
        std::string line;
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += format_number(values[i]);
        }
        out_ << line << '\n';
    }

    void raw_row(const std::vector<std::string>& fields) { write_strings(fields); }

private:
    void write_strings(const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

}  // namespace evplan::csv
