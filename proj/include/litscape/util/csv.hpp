#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace litscape::csv {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// RFC 4180 comma-separated values: quoted fields may contain commas,
// doubled quotes, and line breaks. Accepts \n and \r\n row endings.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::vector<std::vector<std::string>> parse_file(const std::string& path);

// Quotes a field only when needed; always uses \n row endings so output
// bytes do not depend on the platform.
std::string escape_field(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

}  // namespace litscape::csv
