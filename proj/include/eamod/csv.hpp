#pragma once

#include <string>
#include <vector>

namespace eamod {

/// Parsed CSV table: a header row plus data rows of raw string cells.
/// Quoting is not supported; all files in this project are plain
/// comma-separated numerics and identifiers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column. Throws ParseError if absent.
    std::size_t col(const std::string& name, const std::string& file) const;
};

/// Reads a CSV file. Blank lines are skipped. Every data row must have the
/// same number of cells as the header; otherwise ParseError with the
/// 1-based row number.
CsvTable read_csv(const std::string& path);

/// Field accessors with error context (file, 1-based data-row number).
double csv_double(const std::string& cell, const std::string& file, std::size_t row);
long long csv_int(const std::string& cell, const std::string& file, std::size_t row);

/// Formats a double like printf %.17g: shortest form that round-trips.
std::string format_double(double v);

/// Writes rows to path, header first. Throws IoError on failure.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_csv(const std::string& path, const CsvTable& table);

} // namespace eamod
