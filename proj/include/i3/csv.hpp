#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "i3/error.hpp"

// Minimal delimited-text reader/writer. Fields are comma separated; a field
// containing the delimiter, a quote, or a line break must be quoted, and
// quotes inside a quoted field are doubled.

namespace i3::csv {

// Reads the next record from `in` into `fields`. `line` is advanced past the
// consumed physical lines and `record_line` receives the line the record
// started on (1-based). Blank lines are skipped. Returns false at end of
// input.
inline bool read_record(std::istream& in, std::vector<std::string>& fields,
                        std::size_t& line, std::size_t& record_line) {
    fields.clear();
    int c = in.get();
    while (c == '\n' || c == '\r') {
        if (c == '\n') ++line;
        c = in.get();
    }
    if (c == std::istream::traits_type::eof()) return false;

    record_line = line;
    std::string field;
    bool quoted = false;
    while (true) {
        if (c == std::istream::traits_type::eof()) {
            if (quoted)
                throw DataError("line " + std::to_string(record_line) +
                                ": unterminated quoted field");
            fields.push_back(std::move(field));
            ++line;
            return true;
        }
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                int next = in.peek();
                if (next == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
        } else if (ch == '"') {
            if (!field.empty())
                throw DataError("line " + std::to_string(record_line) +
                                ": quote inside unquoted field");
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            ++line;
            fields.push_back(std::move(field));
            return true;
        } else if (ch == '\r') {
            // swallowed; significant only before '\n'
        } else {
            field.push_back(ch);
        }
        c = in.get();
    }
}

inline bool read_record(std::istream& in, std::vector<std::string>& fields,
                        std::size_t& line) {
    std::size_t record_line = 0;
    return read_record(in, fields, line, record_line);
}

inline bool needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

inline std::string escape(std::string_view field) {
    if (!needs_quoting(field)) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

inline void write_record(std::ostream& out,
                         const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << escape(fields[i]);
    }
    out.put('\n');
}

}  // namespace i3::csv
