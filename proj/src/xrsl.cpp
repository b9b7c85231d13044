#include "hsmsim/xrsl.hpp"

#include <charconv>

namespace hsmsim::xrsl {

const Value *Document::find(std::string_view key) const {
    for (const auto &a : attributes) {
        if (a.key == key) {
            return &a.value;
        }
    }
    return nullptr;
}

ParseError::ParseError(std::size_t line, std::size_t col, std::string expected)
    : std::runtime_error{"xrsl:" + std::to_string(line) + ":" + std::to_string(col) + ": expected " + expected},
      line_{line}, col_{col}, expected_{std::move(expected)} {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_special(char c) {
    switch (c) {
        case '(': case ')': case '"': case '\'': case '=': case '&': case '|':
        case '%': case '<': case '>': case '!': case '+':
            return true;
        default:
            return false;
    }
}

bool is_bare(char c) {
    const auto u = static_cast<unsigned char>(c);
    return !is_space(c) && !is_special(c) && (u >= 0x20 && u != 0x7f);
}

struct Pos {
    std::size_t line = 1;
    std::size_t col = 1;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_{text} {}

    Document document() {
        Document doc;
        skip_ws();
        if (peek() != '&') {
            fail("'&' at the start of the job description");
        }
        bump();
        skip_ws();
        if (at_end() || peek() != '(') {
            expect_relation_start();
        }
        while (true) {
            skip_ws();
            if (at_end()) {
                break;
            }
            if (peek() == '%') {
                const Pos p = pos_;
                bump();
                doc.warnings.push_back("ignored stray '%' at line " + std::to_string(p.line) + ", column " +
                                       std::to_string(p.col));
                continue;
            }
            expect_relation_start();
            doc.attributes.push_back(relation());
        }
        return doc;
    }

private:
    [[nodiscard]] bool at_end() const { return i_ >= text_.size(); }
    [[nodiscard]] char peek(std::size_t ahead = 0) const {
        return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
    }

    void bump() {
        if (text_[i_] == '\n') {
            ++pos_.line;
            pos_.col = 1;
        } else {
            ++pos_.col;
        }
        ++i_;
    }

    void skip_ws() {
        while (!at_end() && is_space(peek())) {
            bump();
        }
    }

    [[noreturn]] void fail(std::string expected) const { fail_at(pos_, std::move(expected)); }
    [[noreturn]] static void fail_at(Pos p, std::string expected) { throw ParseError{p.line, p.col, std::move(expected)}; }

    void expect_relation_start() {
        if (at_end() || peek() != '(') {
            if (!at_end() && (peek() == '|' || peek() == '+')) {
                fail("'(' (disjunctions and multi-requests are not supported)");
            }
            fail("'(' to start a relation");
        }
    }

    Attribute relation() {
        const Pos open = pos_;
        bump();  // '('
        skip_ws();
        Attribute attr;
        while (!at_end() && is_bare(peek())) {
            attr.key.push_back(peek());
            bump();
        }
        if (attr.key.empty()) {
            if (at_end()) {
                fail_at(open, "attribute name after unclosed '('");
            }
            fail("attribute name");
        }
        skip_ws();
        if (at_end()) {
            fail_at(open, "'=' in relation opened here");
        }
        if (peek() != '=') {
            if (peek() == '<' || peek() == '>' || peek() == '!') {
                fail("'=' (only equality relations are supported)");
            }
            fail("'='");
        }
        bump();
        skip_ws();
        if (at_end()) {
            fail_at(open, "value and ')' for relation opened here");
        }
        if (peek() == '(') {
            std::vector<Tuple> tuples;
            while (!at_end() && peek() == '(') {
                tuples.push_back(tuple());
                skip_ws();
            }
            attr.value.data = std::move(tuples);
        } else {
            attr.value.data = string_value();
            skip_ws();
        }
        if (at_end()) {
            fail_at(open, "')' to close relation opened here");
        }
        if (peek() != ')') {
            fail("')' after value");
        }
        bump();
        return attr;
    }

    Tuple tuple() {
        const Pos open = pos_;
        bump();  // '('
        Tuple t;
        while (true) {
            skip_ws();
            if (at_end()) {
                fail_at(open, "')' to close tuple opened here");
            }
            if (peek() == ')') {
                bump();
                return t;
            }
            if (peek() == '(') {
                fail("string (nested tuples are not supported)");
            }
            t.push_back(string_value());
        }
    }

    std::string string_value() {
        const Pos start = pos_;
        std::string out;
        if (peek() == '"') {
            bump();
            while (!at_end() && peek() != '"') {
                out.push_back(peek());
                bump();
            }
            if (at_end()) {
                fail_at(start, "closing '\"' for string opened here");
            }
            bump();
            return out;
        }
        if (peek() == '\'') {
            if (peek(1) != '\'') {
                fail("'' or '\"' quoting (a lone single quote is not a string delimiter)");
            }
            bump();
            bump();
            while (!at_end() && !(peek() == '\'' && peek(1) == '\'')) {
                out.push_back(peek());
                bump();
            }
            if (at_end()) {
                fail_at(start, "closing '' for string opened here");
            }
            bump();
            bump();
            return out;
        }
        while (!at_end() && is_bare(peek())) {
            out.push_back(peek());
            bump();
        }
        if (out.empty()) {
            fail("string value");
        }
        return out;
    }

    std::string_view text_;
    std::size_t i_ = 0;
    Pos pos_;
};

std::string quote(const std::string &s) {
    if (s.find('"') != std::string::npos) {
        return "''" + s + "''";
    }
    return "\"" + s + "\"";
}

}  // namespace

Document parse(std::string_view text) { return Parser{text}.document(); }

std::string render(const Document &doc) {
    std::string out = "&";
    for (const auto &a : doc.attributes) {
        out += "(" + a.key + "=";
        if (a.value.is_string()) {
            out += quote(a.value.str());
        } else {
            bool first_tuple = true;
            for (const auto &t : a.value.tuples()) {
                if (!first_tuple) {
                    out += " ";
                }
                first_tuple = false;
                out += "(";
                for (std::size_t i = 0; i < t.size(); ++i) {
                    out += (i != 0 ? " " : "") + quote(t[i]);
                }
                out += ")";
            }
        }
        out += ")";
    }
    return out;
}

std::string Url::str() const { return scheme + "://" + host + ":" + std::to_string(port) + path; }

Url parse_url(std::string_view text) {
    const auto sep = text.find("://");
    if (sep == std::string_view::npos || sep == 0) {
        throw ValidationError{"URL without scheme: '" + std::string{text} + "'"};
    }
    Url url;
    url.scheme = std::string{text.substr(0, sep)};
    std::string_view rest = text.substr(sep + 3);
    const auto slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    url.path = slash == std::string_view::npos ? "/" : std::string{rest.substr(slash)};
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        const std::string_view port = authority.substr(colon + 1);
        int value = 0;
        const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
        if (ec != std::errc{} || end != port.data() + port.size() || value <= 0 || value > 65535) {
            throw ValidationError{"bad port in URL '" + std::string{text} + "'"};
        }
        url.port = value;
        authority = authority.substr(0, colon);
    } else if (url.scheme == "gsiftp") {
        url.port = 2811;
    } else if (url.scheme == "ftp") {
        url.port = 21;
    } else if (url.scheme == "http") {
        url.port = 80;
    } else if (url.scheme == "https") {
        url.port = 443;
    }
    if (authority.empty()) {
        throw ValidationError{"URL without host: '" + std::string{text} + "'"};
    }
    url.host = std::string{authority};
    return url;
}

StageIns extract_stage_ins(const Document &doc) {
    StageIns out;
    const Value *v = doc.find("inputfiles");
    if (v == nullptr) {
        return out;
    }
    if (v->is_string()) {
        throw ValidationError{"inputfiles must be a list of (name url) tuples"};
    }
    for (const auto &t : v->tuples()) {
        if (t.size() != 2) {
            throw ValidationError{"inputfiles tuple has " + std::to_string(t.size()) + " elements, expected 2"};
        }
        Url url = parse_url(t[1]);
        if (url.scheme != "gsiftp") {
            out.unsupported.push_back(t[0] + ": unsupported URL scheme '" + url.scheme + "' in " + t[1]);
            continue;
        }
        out.routable.push_back({t[0], std::move(url)});
    }
    return out;
}

}  // namespace hsmsim::xrsl
