#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace litscape::strings {

// Decodes one UTF-8 code point starting at byte offset `i`.
// Invalid sequences decode as U+FFFD and consume a single byte, so the
// scan always terminates.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i);

// Appends the UTF-8 encoding of `cp` to `out`.
void append_utf8(std::string& out, std::uint32_t cp);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);
bool equals_ci(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Locale-independent shortest round-trip formatting.
std::string format_double(double v);

}  // namespace litscape::strings
