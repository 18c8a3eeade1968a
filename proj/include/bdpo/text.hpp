#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bdpo {

// Shortest decimal representation that parses back to the same double
// (std::to_chars round-trip guarantee).
std::string format_double(double value);

// Strict parsers: the whole token must be consumed, otherwise they throw
// ValidationError with the offending text.
double parse_double(std::string_view token);
std::int64_t parse_int(std::string_view token);
std::uint64_t parse_uint(std::string_view token);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);

}  // namespace bdpo
