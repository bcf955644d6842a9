#pragma once

// Internal line-oriented CSV helpers shared by the parsers. Fields must not
// contain commas or quotes; the formats this library defines never need
// them (identifiers and numbers only).

#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vfropt/errors.hpp"

namespace vfropt::detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

// Strips one trailing '\r' so CRLF input parses like LF input.
inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline int parse_int_field(std::string_view text, std::string_view field_name,
                           std::size_t line_no) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("field '" + std::string(field_name) + "' is not an integer: '" +
                             std::string(text) + "'",
                         line_no);
    }
    return value;
}

inline double parse_double_field(std::string_view text, std::string_view field_name,
                                 std::size_t line_no) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("field '" + std::string(field_name) + "' is not a number: '" +
                             std::string(text) + "'",
                         line_no);
    }
    return value;
}

inline std::optional<double> parse_optional_double_field(std::string_view text,
                                                         std::string_view field_name,
                                                         std::size_t line_no) {
    if (text.empty()) return std::nullopt;
    return parse_double_field(text, field_name, line_no);
}

// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace vfropt::detail
