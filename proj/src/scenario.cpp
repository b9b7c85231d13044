#include "hsmsim/scenario.hpp"

#include "hsmsim/error.hpp"
#include "hsmsim/units.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace hsmsim {

const std::vector<KeySchema> &scenario_schema() {
    using T = ValueType;
    static const std::vector<KeySchema> schema{
        {"scenario.id", T::text, ""},
        {"scenario.experiment", T::text, ""},
        {"scenario.description", T::text, ""},
        {"scenario.paths", T::list, "WAN"},
        {"scenario.checks", T::list, ""},
        {"scenario.repetitions", T::count, "1"},
        {"scenario.job", T::text, ""},
        {"network.lan_rtt", T::seconds, "0.2ms"},
        {"network.wan_rtt", T::seconds, "3.5ms"},
        {"network.capacity", T::rate, "125MB"},
        {"network.loss_rate", T::real, "0"},
        {"network.loss_k", T::real, "0"},
        {"movers.count", T::count, "2"},
        {"movers.names", T::list, ""},
        {"movers.disks", T::count, "2"},
        {"movers.disk_rate", T::rate, "80MB"},
        {"movers.disk_alpha", T::real, "0.2"},
        {"movers.cpu_cap", T::rate, "90MB"},
        {"movers.tcp_buffer", T::bytes, "256KiB"},
        {"movers.nic_capacity", T::rate, "125MB"},
        {"client.name", T::text, "client"},
        {"client.cpu_cap", T::rate, "125MB"},
        {"client.tcp_buffer", T::bytes, "64MB"},
        {"client.nic_capacity", T::rate, "125MB"},
        {"client.disks", T::count, "1"},
        {"client.disk_rate", T::rate, "40MB"},
        {"client.disk_alpha", T::real, "0.2"},
        {"core.name", T::text, "core"},
        {"library.drives", T::count, "4"},
        {"library.accessors", T::count, "2"},
        {"library.exchange_time", T::seconds, "90s"},
        {"library.drive_rate", T::rate, "14MB"},
        {"library.premounted", T::boolean, "false"},
        {"transfer.protocol", T::text, "pftp"},
        {"transfer.packet", T::bytes, "256KiB"},
        {"transfer.pipelined", T::boolean, "false"},
        {"transfer.pwidth", T::count, "1"},
        {"transfer.api_buffer", T::bytes, "1MiB"},
        {"transfer.buffer", T::bytes, ""},
        {"transfer.streams", T::count, "1"},
        {"transfer.file_size", T::bytes, "2GB"},
        {"transfer.files", T::count, "1"},
        {"transfer.direction", T::text, "read"},
        {"transfer.client_end", T::text, "null"},
        {"transfer.overlap", T::text, "serial"},
        {"dialect.client", T::text, "gridftp"},
        {"dialect.server", T::text, "gsipftp"},
        {"dialect.client_requires", T::list, ""},
        {"dialect.server_requires", T::list, ""},
        {"dialect.client_realm", T::text, "KEK.JP"},
        {"dialect.server_realm", T::text, "KEK.JP"},
        {"dialect.sbuf", T::bytes, ""},
        {"dialect.pftpd", T::text, "core"},
        {"dialect.data_host", T::text, "mover0"},
        {"scenario.path", T::text, ""},
    };
    return schema;
}

std::optional<ValueType> key_type(std::string_view key) {
    for (const auto &k : scenario_schema()) {
        if (k.key == key) {
            return k.type;
        }
    }
    for (std::string_view prefix : {"staging.alias.", "staging.place."}) {
        if (key.size() > prefix.size() && key.substr(0, prefix.size()) == prefix) {
            return ValueType::text;
        }
    }
    return std::nullopt;
}

namespace {

void check_value(const std::string &key, const std::string &value, const std::string &where) {
    const auto type = key_type(key);
    if (!type) {
        throw ConfigError{where + ": unknown key '" + key + "'"};
    }
    try {
        switch (*type) {
            case ValueType::text:
            case ValueType::list:
                break;
            case ValueType::bytes:
                (void)units::parse_bytes(value);
                break;
            case ValueType::rate:
                (void)units::parse_rate(value);
                break;
            case ValueType::seconds:
                (void)units::parse_seconds(value);
                break;
            case ValueType::count:
                (void)units::parse_count(value);
                break;
            case ValueType::real:
                (void)units::parse_real(value);
                break;
            case ValueType::boolean:
                (void)units::parse_bool(value);
                break;
        }
    } catch (const ConfigError &e) {
        throw ConfigError{where + ": " + key + ": " + e.what()};
    }
}

void finish(Scenario &s, const std::string &origin) {
    const auto get = [&](const char *key) -> std::string {
        auto it = s.settings.find(key);
        return it == s.settings.end() ? std::string{} : it->second;
    };
    s.id = get("scenario.id");
    s.experiment = get("scenario.experiment");
    s.description = get("scenario.description");
    if (s.id.empty()) {
        throw ConfigError{origin + ": scenario.id is required"};
    }
    if (s.experiment.empty()) {
        throw ConfigError{origin + ": scenario.experiment is required"};
    }
    s.paths = units::parse_list(s.settings.count("scenario.paths") ? get("scenario.paths") : "WAN");
    if (s.paths.empty()) {
        throw ConfigError{origin + ": scenario.paths is empty"};
    }
    if (s.sweep_key.empty()) {
        throw ConfigError{origin + ": [sweep] variable is required"};
    }
    if (s.sweep_values.empty()) {
        throw ConfigError{origin + ": sweep over " + s.sweep_key + " has no values"};
    }
    if (s.sweep_key.rfind("scenario.", 0) == 0) {
        throw ConfigError{origin + ": cannot sweep " + s.sweep_key};
    }
    for (const auto &v : s.sweep_values) {
        check_value(s.sweep_key, v, origin + " [sweep]");
    }
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string &origin_name, const std::filesystem::path &base_dir) {
    Scenario s;
    s.origin = base_dir;
    std::string section;
    Variant *variant = nullptr;
    std::set<std::string> seen_variants;
    std::size_t line_no = 0;

    std::istringstream in{std::string{text}};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string where = origin_name + ":" + std::to_string(line_no);
        std::string_view line = units::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError{where + ": unterminated section header"};
            }
            section = std::string{units::trim(line.substr(1, line.size() - 2))};
            variant = nullptr;
            if (section.rfind("variant.", 0) == 0) {
                const std::string name = section.substr(8);
                if (name.empty() || !seen_variants.insert(name).second) {
                    throw ConfigError{where + ": empty or duplicate variant name"};
                }
                s.variants.push_back({name, {}});
                variant = &s.variants.back();
                continue;
            }
            static const std::set<std::string> known{"scenario", "network", "movers",  "client", "core",
                                                     "library",  "transfer", "dialect", "staging", "sweep"};
            if (known.count(section) == 0) {
                throw ConfigError{where + ": unknown section [" + section + "]"};
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError{where + ": expected key = value"};
        }
        const std::string key{units::trim(line.substr(0, eq))};
        std::string value{units::trim(line.substr(eq + 1))};
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (section.empty()) {
            throw ConfigError{where + ": key outside any section"};
        }
        if (variant != nullptr) {
            if (key.rfind("scenario.", 0) == 0) {
                throw ConfigError{where + ": variants cannot override " + key};
            }
            check_value(key, value, where);
            variant->overrides[key] = value;
            continue;
        }
        if (section == "sweep") {
            if (key == "variable") {
                s.sweep_key = value;
            } else if (key == "values") {
                s.sweep_values = units::parse_list(value);
            } else {
                throw ConfigError{where + ": unknown key 'sweep." + key + "'"};
            }
            continue;
        }
        const std::string full = section + "." + key;
        check_value(full, value, where);
        if (full == "scenario.path") {
            throw ConfigError{where + ": scenario.path is set per point, use scenario.paths"};
        }
        if (!s.settings.emplace(full, value).second) {
            throw ConfigError{where + ": duplicate key '" + full + "'"};
        }
    }
    finish(s, origin_name);
    return s;
}

Scenario load_scenario(const std::filesystem::path &file) {
    std::ifstream in{file};
    if (!in) {
        throw ConfigError{"cannot read scenario file " + file.string()};
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), file.string(), file.parent_path());
}

void apply_override(Scenario &s, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError{"--set expects section.key=value, got '" + std::string{assignment} + "'"};
    }
    const std::string key{units::trim(assignment.substr(0, eq))};
    const std::string value{units::trim(assignment.substr(eq + 1))};
    if (key == "sweep.values") {
        s.sweep_values = units::parse_list(value);
    } else if (key == "sweep.variable") {
        s.sweep_key = value;
    } else {
        check_value(key, value, "--set");
        s.settings[key] = value;
        for (auto &v : s.variants) {
            v.overrides.erase(key);
        }
    }
    finish(s, "--set " + key);
}

std::vector<Scenario> load_suite(const std::filesystem::path &dir, std::string_view selection) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError{"scenario directory " + dir.string() + " does not exist"};
    }
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator{dir}) {
        if (entry.is_regular_file() && entry.path().extension() == ".ini") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> all;
    for (const auto &f : files) {
        all.push_back(load_scenario(f));
    }
    check_unique_ids(all);
    if (selection == "all") {
        return all;
    }
    std::vector<Scenario> picked;
    for (const auto &id : units::parse_list(selection)) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const Scenario &s) { return s.id == id; });
        if (it == all.end()) {
            throw ConfigError{"no scenario with id '" + id + "' in " + dir.string()};
        }
        picked.push_back(*it);
    }
    check_unique_ids(picked);
    return picked;
}

void check_unique_ids(const std::vector<Scenario> &suite) {
    std::set<std::string> ids;
    for (const auto &s : suite) {
        if (!ids.insert(s.id).second) {
            throw ConfigError{"duplicate scenario id '" + s.id + "'"};
        }
    }
}

KeyValues Scenario::resolve(const std::string &path, std::size_t variant, std::size_t sweep) const {
    KeyValues kv;
    for (const auto &k : scenario_schema()) {
        kv[std::string{k.key}] = std::string{k.fallback};
    }
    for (const auto &[k, v] : settings) {
        kv[k] = v;
    }
    if (!variants.empty()) {
        for (const auto &[k, v] : variants.at(variant).overrides) {
            kv[k] = v;
        }
    }
    kv[sweep_key] = sweep_values.at(sweep);
    kv["scenario.path"] = path;
    return kv;
}

std::string Scenario::series(const std::string &path, std::size_t variant) const {
    if (variants.empty()) {
        return path;
    }
    return path + "-" + variants.at(variant).name;
}

bool Settings::has(const std::string &key) const {
    const auto it = kv_.find(key);
    return it != kv_.end() && !it->second.empty();
}

const std::string &Settings::text(const std::string &key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
        throw ConfigError{"missing setting " + key};
    }
    return it->second;
}

namespace {
template <class F>
auto typed(const Settings &s, const std::string &key, F parse) {
    try {
        return parse(s.text(key));
    } catch (const ConfigError &e) {
        throw ConfigError{key + ": " + e.what()};
    }
}
}  // namespace

double Settings::bytes(const std::string &key) const { return typed(*this, key, units::parse_bytes); }
double Settings::rate(const std::string &key) const { return typed(*this, key, units::parse_rate); }
double Settings::seconds(const std::string &key) const { return typed(*this, key, units::parse_seconds); }
std::size_t Settings::count(const std::string &key) const {
    return static_cast<std::size_t>(typed(*this, key, units::parse_count));
}
double Settings::real(const std::string &key) const { return typed(*this, key, units::parse_real); }
bool Settings::boolean(const std::string &key) const { return typed(*this, key, units::parse_bool); }
std::vector<std::string> Settings::list(const std::string &key) const { return units::parse_list(text(key)); }

std::map<std::string, std::string> Settings::with_prefix(const std::string &prefix) const {
    std::map<std::string, std::string> out;
    for (auto it = kv_.lower_bound(prefix); it != kv_.end() && it->first.rfind(prefix, 0) == 0; ++it) {
        out[it->first.substr(prefix.size())] = it->second;
    }
    return out;
}

}  // namespace hsmsim
