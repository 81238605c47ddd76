#include "arqsched/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace arqsched::csv {

std::string escape(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

namespace {

// Shared record scanner. Returns the index just past the record terminator.
std::size_t scan_record(std::string_view text, std::size_t pos, std::vector<std::string>& out,
                        bool allow_newline_in_quotes) {
    out.clear();
    std::string field;
    bool in_quotes = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else if ((c == '\n' || c == '\r') && !allow_newline_in_quotes) {
                throw std::invalid_argument("newline inside quoted field");
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            if (!field.empty()) throw std::invalid_argument("quote inside unquoted field");
            in_quotes = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            break;
        } else {
            field.push_back(c);
        }
        ++pos;
    }
    if (in_quotes) throw std::invalid_argument("unterminated quoted field");
    out.push_back(std::move(field));
    if (pos < text.size() && text[pos] == '\r') {
        ++pos;
        if (pos < text.size() && text[pos] == '\n') ++pos;
    } else if (pos < text.size() && text[pos] == '\n') {
        ++pos;
    }
    return pos;
}

} // namespace

std::vector<std::string> parse_line(std::string_view line) {
    std::vector<std::string> out;
    const std::size_t end = scan_record(line, 0, out, false);
    if (end < line.size()) throw std::invalid_argument("trailing content after record");
    return out;
}

std::vector<std::vector<std::string>> parse(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::vector<std::string> record;
        pos = scan_record(text, pos, record, true);
        records.push_back(std::move(record));
    }
    return records;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

} // namespace arqsched::csv
