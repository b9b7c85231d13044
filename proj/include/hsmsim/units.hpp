#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hsmsim::units {

// All throw ConfigError with the offending text.

// "2GB" = 2e9, "256KiB" = 262144, "64kB" = 64000; bare numbers are bytes.
double parse_bytes(std::string_view text);
// A byte size per second ("80MB", "80MB/s") or a bit rate ("1Gbps").
double parse_rate(std::string_view text);
// "90s", "3.5ms", "200us"; bare numbers are seconds.
double parse_seconds(std::string_view text);
std::uint64_t parse_count(std::string_view text);
double parse_real(std::string_view text);
bool parse_bool(std::string_view text);
// Comma-separated, trimmed, empty items dropped.
std::vector<std::string> parse_list(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace hsmsim::units
