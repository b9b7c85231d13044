#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsmsim {

// "section.key" -> raw value text.
using KeyValues = std::map<std::string, std::string>;

enum class ValueType { text, bytes, rate, seconds, count, real, boolean, list };

struct KeySchema {
    std::string_view key;
    ValueType type;
    std::string_view fallback;  // empty: no default
};

// Every accepted key. Keys under staging.alias. and staging.place. are open-ended.
[[nodiscard]] const std::vector<KeySchema> &scenario_schema();
[[nodiscard]] std::optional<ValueType> key_type(std::string_view key);

struct Variant {
    std::string name;
    KeyValues overrides;
};

// One experiment: base settings, optional named variants (one output series
// each, per path) and a sweep of one key over a list of values.
struct Scenario {
    std::string id;
    std::string experiment;
    std::string description;
    std::filesystem::path origin;  // directory used to resolve relative paths
    KeyValues settings;
    std::vector<std::string> paths;
    std::vector<Variant> variants;
    std::string sweep_key;
    std::vector<std::string> sweep_values;

    // Settings for one (path, variant, sweep value) point, defaults filled in.
    [[nodiscard]] KeyValues resolve(const std::string &path, std::size_t variant, std::size_t sweep) const;
    // Series label: path, or path-variant.
    [[nodiscard]] std::string series(const std::string &path, std::size_t variant) const;
    [[nodiscard]] std::size_t variant_count() const { return variants.empty() ? 1 : variants.size(); }
};

// Parses the scenario text format:
//
//   # comment
//   [scenario]            id, experiment, description, paths, checks, repetitions, job
//   [network] [movers] [client] [core] [library] [transfer] [dialect] [staging]
//   [variant.NAME]        section.key = value overrides for one series
//   [sweep]               variable = section.key ; values = v1, v2, ...
//
// Unknown sections or keys are ConfigErrors naming the key and line.
[[nodiscard]] Scenario parse_scenario(std::string_view text, const std::string &origin_name,
                                      const std::filesystem::path &base_dir = {});
[[nodiscard]] Scenario load_scenario(const std::filesystem::path &file);

// `--set section.key=value`; validated like file content. Wins over variants.
void apply_override(Scenario &s, std::string_view assignment);

// Every *.ini in dir, sorted by file name. `selection` is "all" or a
// comma-separated list of scenario ids. Duplicate ids are an error.
[[nodiscard]] std::vector<Scenario> load_suite(const std::filesystem::path &dir, std::string_view selection = "all");

void check_unique_ids(const std::vector<Scenario> &suite);

// Typed accessors over resolved settings; all throw ConfigError naming the key.
class Settings {
public:
    explicit Settings(const KeyValues &kv) : kv_{kv} {}

    [[nodiscard]] bool has(const std::string &key) const;
    [[nodiscard]] const std::string &text(const std::string &key) const;
    [[nodiscard]] double bytes(const std::string &key) const;
    [[nodiscard]] double rate(const std::string &key) const;
    [[nodiscard]] double seconds(const std::string &key) const;
    [[nodiscard]] std::size_t count(const std::string &key) const;
    [[nodiscard]] double real(const std::string &key) const;
    [[nodiscard]] bool boolean(const std::string &key) const;
    [[nodiscard]] std::vector<std::string> list(const std::string &key) const;
    // Entries under a prefix, prefix stripped.
    [[nodiscard]] std::map<std::string, std::string> with_prefix(const std::string &prefix) const;

private:
    const KeyValues &kv_;
};

}  // namespace hsmsim
