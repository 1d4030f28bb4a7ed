#include "eamod/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "eamod/errors.hpp"

namespace eamod {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    // Trim surrounding spaces; data files are machine-written but be lenient.
    for (auto& c : cells) {
        std::size_t b = c.find_first_not_of(" \t");
        std::size_t e = c.find_last_not_of(" \t");
        c = (b == std::string::npos) ? std::string() : c.substr(b, e - b + 1);
    }
    return cells;
}

} // namespace

std::size_t CsvTable::col(const std::string& name, const std::string& file) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ParseError(file, 0, "missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    CsvTable t;
    std::string line;
    std::size_t data_row = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        ++data_row;
        if (cells.size() != t.header.size())
            throw ParseError(path, data_row,
                             "expected " + std::to_string(t.header.size()) + " cells, got " +
                                 std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw ParseError(path, 0, "empty file");
    return t;
}

double csv_double(const std::string& cell, const std::string& file, std::size_t row) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError(file, row, "bad numeric value '" + cell + "'");
    return v;
}

long long csv_int(const std::string& cell, const std::string& file, std::size_t row) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError(file, row, "bad integer value '" + cell + "'");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Prefer the shortest representation that parses back exactly.
    for (int prec = 1; prec <= 16; ++prec) {
        char trial[64];
        std::snprintf(trial, sizeof(trial), "%.*g", prec, v);
        if (std::strtod(trial, nullptr) == v) return trial;
    }
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out << (i ? "," : "") << r[i];
        out << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

void write_csv(const std::string& path, const CsvTable& table) {
    write_csv(path, table.header, table.rows);
}

} // namespace eamod
