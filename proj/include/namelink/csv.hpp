#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace namelink {

// Minimal RFC-4180 style CSV support: quoted fields, embedded commas/quotes,
// header row with column lookup. Newlines inside quoted fields are accepted.
class CsvReader {
public:
    explicit CsvReader(std::istream& in);

    // Header columns as read, in file order.
    const std::vector<std::string>& header() const { return header_; }

    // Index of a column, or -1 when absent.
    int column(std::string_view name) const;

    // Reads the next data row into `row`; returns false at end of input.
    bool next(std::vector<std::string>& row);

private:
    std::istream& in_;
    std::vector<std::string> header_;
    bool parse_row(std::vector<std::string>& row);
};

std::string csv_escape(std::string_view field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace namelink
