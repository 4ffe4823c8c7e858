#pragma once

// Internal CSV tokenizer: comma separation, double-quote quoting with ""
// escapes, LF or CRLF line ends. Good enough for the schemas this project
// reads and writes; not a general CSV library.

#include <string>
#include <string_view>
#include <vector>

namespace sitewatch::detail {

inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            row_started = true;
            break;
        case ',':
            end_field();
            row_started = true;
            break;
        case '\r':
            break;
        case '\n':
            if (row_started || !field.empty() || !row.empty()) end_row();
            break;
        default:
            field += c;
            row_started = true;
            break;
        }
    }
    if (row_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

inline std::string csv_escape(std::string_view s) {
    bool needs_quotes = s.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace sitewatch::detail
