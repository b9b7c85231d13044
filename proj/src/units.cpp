#include "hsmsim/units.hpp"

#include "hsmsim/error.hpp"

#include <charconv>
#include <cmath>
#include <utility>

namespace hsmsim::units {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

namespace {

// Leading number and the remaining suffix.
std::pair<double, std::string_view> split_number(std::string_view text, const char *what) {
    text = trim(text);
    double value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || !std::isfinite(value)) {
        throw ConfigError{std::string{"bad "} + what + " '" + std::string{text} + "'"};
    }
    return {value, trim(std::string_view{end, static_cast<std::size_t>(text.data() + text.size() - end)})};
}

struct Suffix {
    std::string_view name;
    double scale;
};

constexpr Suffix byte_suffixes[] = {
    {"", 1},        {"B", 1},           {"kB", 1e3},         {"KB", 1e3},         {"MB", 1e6},
    {"GB", 1e9},    {"TB", 1e12},       {"KiB", 1024.0},     {"MiB", 1048576.0},  {"GiB", 1073741824.0},
};

double scaled_bytes(double value, std::string_view suffix, std::string_view text) {
    for (const auto &s : byte_suffixes) {
        if (s.name == suffix) {
            return value * s.scale;
        }
    }
    throw ConfigError{"unknown size unit in '" + std::string{text} + "'"};
}

}  // namespace

double parse_bytes(std::string_view text) {
    const auto [value, suffix] = split_number(text, "size");
    const double v = scaled_bytes(value, suffix, text);
    if (v < 0) {
        throw ConfigError{"negative size '" + std::string{text} + "'"};
    }
    return v;
}

double parse_rate(std::string_view text) {
    if (trim(text) == "inf") {
        return HUGE_VAL;
    }
    auto [value, suffix] = split_number(text, "rate");
    if (value < 0) {
        throw ConfigError{"negative rate '" + std::string{text} + "'"};
    }
    if (suffix == "Mbps") {
        return value * 1e6 / 8;
    }
    if (suffix == "Gbps") {
        return value * 1e9 / 8;
    }
    if (suffix.size() >= 2 && suffix.substr(suffix.size() - 2) == "/s") {
        suffix = suffix.substr(0, suffix.size() - 2);
    }
    return scaled_bytes(value, suffix, text);
}

double parse_seconds(std::string_view text) {
    const auto [value, suffix] = split_number(text, "duration");
    double v = 0;
    if (suffix.empty() || suffix == "s") {
        v = value;
    } else if (suffix == "ms") {
        v = value * 1e-3;
    } else if (suffix == "us") {
        v = value * 1e-6;
    } else {
        throw ConfigError{"unknown time unit in '" + std::string{text} + "'"};
    }
    if (v < 0) {
        throw ConfigError{"negative duration '" + std::string{text} + "'"};
    }
    return v;
}

std::uint64_t parse_count(std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ConfigError{"bad count '" + std::string{text} + "'"};
    }
    return v;
}

double parse_real(std::string_view text) {
    const auto [value, suffix] = split_number(text, "number");
    if (!suffix.empty()) {
        throw ConfigError{"unexpected suffix in '" + std::string{text} + "'"};
    }
    return value;
}

bool parse_bool(std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "yes" || text == "1" || text == "on") {
        return true;
    }
    if (text == "false" || text == "no" || text == "0" || text == "off") {
        return false;
    }
    throw ConfigError{"bad boolean '" + std::string{text} + "'"};
}

std::vector<std::string> parse_list(std::string_view text) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace hsmsim::units
