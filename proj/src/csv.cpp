#include "namelink/csv.hpp"

#include <istream>
#include <ostream>

namespace namelink {

CsvReader::CsvReader(std::istream& in) : in_(in) {
    parse_row(header_);
}

int CsvReader::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

bool CsvReader::next(std::vector<std::string>& row) {
    return parse_row(row);
}

bool CsvReader::parse_row(std::vector<std::string>& row) {
    row.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in_.get()) != EOF) {
        any = true;
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    field.push_back('"');
                    in_.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            // swallow; \r\n handled by the \n branch
        } else {
            field.push_back(ch);
        }
    }
    if (!any) return false;
    row.push_back(std::move(field));
    return true;
}

std::string csv_escape(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << csv_escape(fields[i]);
    }
    out.put('\n');
}

}  // namespace namelink
