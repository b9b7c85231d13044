#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hsmsim::xrsl {

using Tuple = std::vector<std::string>;

// A relation value: one string, or one or more parenthesised tuples.
struct Value {
    std::variant<std::string, std::vector<Tuple>> data;

    [[nodiscard]] bool is_string() const { return std::holds_alternative<std::string>(data); }
    [[nodiscard]] const std::string &str() const { return std::get<std::string>(data); }
    [[nodiscard]] const std::vector<Tuple> &tuples() const { return std::get<std::vector<Tuple>>(data); }

    friend bool operator==(const Value &, const Value &) = default;
};

struct Attribute {
    std::string key;
    Value value;

    friend bool operator==(const Attribute &, const Attribute &) = default;
};

struct Document {
    std::vector<Attribute> attributes;  // in source order
    std::vector<std::string> warnings;  // not part of equality

    // First attribute with this key (case-sensitive), or nullptr.
    [[nodiscard]] const Value *find(std::string_view key) const;

    friend bool operator==(const Document &a, const Document &b) { return a.attributes == b.attributes; }
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t col, std::string expected);

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t col() const { return col_; }
    [[nodiscard]] const std::string &expected() const { return expected_; }

private:
    std::size_t line_;
    std::size_t col_;
    std::string expected_;
};

// Conjunction of (key=value) relations after a leading '&'. Values may be bare
// words, "double quoted", ''doubled single quoted'', or tuple lists. A stray '%'
// between relations is skipped with a warning. Disjunction, multi-request and
// relational operators other than '=' are rejected.
[[nodiscard]] Document parse(std::string_view text);

// Canonical one-line form; parse(render(d)) == d.
[[nodiscard]] std::string render(const Document &doc);

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Url {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;

    [[nodiscard]] std::string str() const;
    friend bool operator==(const Url &, const Url &) = default;
};

// scheme://host[:port]/path. gsiftp defaults to port 2811. Throws ValidationError.
[[nodiscard]] Url parse_url(std::string_view text);

struct StageInRequest {
    std::string name;  // logical file name in the job's session directory
    Url url;

    friend bool operator==(const StageInRequest &, const StageInRequest &) = default;
};

struct StageIns {
    std::vector<StageInRequest> routable;  // gsiftp only
    std::vector<std::string> unsupported;  // diagnostics for other schemes
};

// One request per (name url) tuple under inputfiles. Throws ValidationError for
// a tuple that is not a pair or an unparsable URL.
[[nodiscard]] StageIns extract_stage_ins(const Document &doc);

}  // namespace hsmsim::xrsl
