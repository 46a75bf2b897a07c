#include "sigforge/yara_rule.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "sigforge/util.hpp"

namespace sigforge {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool hex_digit(char c) { return std::isxdigit(static_cast<unsigned char>(c)); }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return c - 'A' + 10;
}

void validate_rule(const YaraRule& rule) {
    if (rule.patterns.empty()) throw ArgumentError("rule has no patterns");
    if (rule.clauses.empty()) throw ArgumentError("rule has no clauses");
    for (const auto& p : rule.patterns)
        if (p.empty()) throw ArgumentError("empty pattern");
    std::set<std::vector<std::uint8_t>> distinct(rule.patterns.begin(), rule.patterns.end());
    if (distinct.size() != rule.patterns.size())
        throw ArgumentError("patterns must be pairwise distinct");
    for (const auto& clause : rule.clauses) {
        if (clause.feature_ids.empty()) throw ArgumentError("clause with no patterns");
        if (clause.threshold_t < 1 ||
            clause.threshold_t > static_cast<int>(clause.feature_ids.size()))
            throw ArgumentError("clause threshold out of range");
        for (int id : clause.feature_ids) {
            if (id < 0 || id >= static_cast<int>(rule.patterns.size()))
                throw ArgumentError("clause references pattern " + std::to_string(id) +
                                    " which does not exist");
        }
    }
}

// Tiny cursor over the rule text; all parse errors carry the offending
// token so out-of-subset input is diagnosable.
class Scanner {
public:
    explicit Scanner(const std::string& text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect_char(char c, const char* where) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            throw FormatError(std::string("expected '") + c + "' " + where + ", got '" +
                              next_token_preview() + "'");
        ++pos_;
    }

    // Identifiers may include '.' so module references like pe.imphash are
    // captured whole and rejected by name.
    std::string read_ident(const char* where) {
        skip_ws();
        if (pos_ >= text_.size() || !ident_start(text_[pos_]))
            throw FormatError(std::string("expected identifier ") + where + ", got '" +
                              next_token_preview() + "'");
        std::size_t start = pos_;
        while (pos_ < text_.size() && (ident_char(text_[pos_]) || text_[pos_] == '.')) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    int read_int(const char* where) {
        skip_ws();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw FormatError(std::string("expected integer ") + where + ", got '" +
                              next_token_preview() + "'");
        long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1'000'000'000L) throw FormatError("integer literal too large");
            ++pos_;
        }
        return static_cast<int>(v);
    }

    std::string read_dollar_name() {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '$')
            throw FormatError("expected a $-pattern reference, got '" + next_token_preview() +
                              "'");
        ++pos_;
        if (pos_ >= text_.size() || !ident_start(text_[pos_]))
            throw FormatError("expected a name after '$'");
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    // Raw whitespace-delimited chunk inside a hex string body.
    std::string read_hex_chunk() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '}')
            ++pos_;
        return text_.substr(start, pos_ - start);
    }

    std::string next_token_preview() {
        skip_ws();
        if (pos_ >= text_.size()) return "<end of input>";
        std::size_t end = pos_;
        if (ident_start(text_[end]) || text_[end] == '$') {
            ++end;
            while (end < text_.size() && (ident_char(text_[end]) || text_[end] == '.')) ++end;
        } else {
            ++end;
        }
        return text_.substr(pos_, std::min<std::size_t>(end - pos_, 32));
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
};

[[noreturn]] void unsupported(const std::string& token) {
    throw FormatError("unsupported construct: " + token);
}

std::vector<std::uint8_t> parse_hex_body(Scanner& s) {
    std::vector<std::uint8_t> bytes;
    s.expect_char('{', "to open a hex string");
    while (true) {
        if (s.peek() == '}') {
            s.expect_char('}', "to close a hex string");
            break;
        }
        const std::string chunk = s.read_hex_chunk();
        if (chunk.empty()) throw FormatError("unterminated hex string");
        if (chunk.size() != 2 || !hex_digit(chunk[0]) || !hex_digit(chunk[1]))
            unsupported(chunk);
        bytes.push_back(static_cast<std::uint8_t>(hex_value(chunk[0]) * 16 +
                                                  hex_value(chunk[1])));
    }
    if (bytes.empty()) throw FormatError("empty hex string");
    return bytes;
}

RuleClause parse_clause(Scanner& s, std::size_t pattern_count) {
    s.expect_char('(', "to open a condition clause");
    int threshold;
    bool all = false;
    if (std::isdigit(static_cast<unsigned char>(s.peek()))) {
        threshold = s.read_int("as clause threshold");
    } else {
        const std::string word = s.read_ident("as clause threshold");
        if (word != "all") unsupported(word);
        all = true;
        threshold = 0;
    }
    const std::string of = s.read_ident("after clause threshold");
    if (of != "of") unsupported(of);
    s.expect_char('(', "to open the pattern list");

    RuleClause clause;
    while (true) {
        const std::string name = s.read_dollar_name();
        if (name.size() < 2 || name[0] != 'x' ||
            !std::all_of(name.begin() + 1, name.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw FormatError("pattern reference $" + name + " is not of the form $x<int>");
        const int id = std::stoi(name.substr(1));
        if (id >= static_cast<int>(pattern_count))
            throw FormatError("condition references undeclared pattern $" + name);
        clause.feature_ids.push_back(id);
        if (s.peek() == ',') {
            s.expect_char(',', "in pattern list");
            continue;
        }
        break;
    }
    s.expect_char(')', "to close the pattern list");
    s.expect_char(')', "to close the clause");

    clause.threshold_t = all ? static_cast<int>(clause.feature_ids.size()) : threshold;
    if (clause.threshold_t < 1 ||
        clause.threshold_t > static_cast<int>(clause.feature_ids.size()))
        throw FormatError("clause threshold " + std::to_string(clause.threshold_t) +
                          " outside [1, " + std::to_string(clause.feature_ids.size()) + "]");
    return clause;
}

}  // namespace

std::string sanitize_identifier(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) out.push_back(ident_char(c) ? c : '_');
    if (out.empty()) return "unnamed";
    if (!ident_start(out[0])) out.insert(out.begin(), '_');
    return out;
}

std::string emit_yara(const YaraRule& rule) {
    validate_rule(rule);
    std::ostringstream out;
    out << "rule " << sanitize_identifier(rule.name) << "\n{\n    strings:\n";
    for (std::size_t i = 0; i < rule.patterns.size(); ++i) {
        out << "        $x" << i << " = {";
        for (std::uint8_t b : rule.patterns[i]) {
            static const char* digits = "0123456789ABCDEF";
            out << ' ' << digits[b >> 4] << digits[b & 0xF];
        }
        out << " }\n";
    }
    out << "    condition:\n        ";
    for (std::size_t c = 0; c < rule.clauses.size(); ++c) {
        if (c > 0) out << " or ";
        const RuleClause& clause = rule.clauses[c];
        out << '(' << clause.threshold_t << " of (";
        for (std::size_t i = 0; i < clause.feature_ids.size(); ++i) {
            if (i > 0) out << ',';
            out << "$x" << clause.feature_ids[i];
        }
        out << "))";
    }
    out << "\n}\n";
    return out.str();
}

YaraRule parse_rule(const std::string& text) {
    Scanner s(text);
    YaraRule rule;

    std::string kw = s.read_ident("at start of rule");
    if (kw != "rule") unsupported(kw);
    rule.name = s.read_ident("as rule name");
    if (rule.name.find('.') != std::string::npos) unsupported(rule.name);
    s.expect_char('{', "to open the rule body");

    kw = s.read_ident("for the strings section");
    if (kw != "strings") unsupported(kw);
    s.expect_char(':', "after 'strings'");

    while (s.peek() == '$') {
        const std::string name = s.read_dollar_name();
        const std::string want = "x" + std::to_string(rule.patterns.size());
        if (name != want)
            throw FormatError("patterns must be declared as $x0..$x<P-1> in order; got $" +
                              name + " where $" + want + " was expected");
        s.expect_char('=', "after pattern name");
        rule.patterns.push_back(parse_hex_body(s));
    }
    if (rule.patterns.empty()) throw FormatError("rule declares no patterns");

    kw = s.read_ident("for the condition section");
    if (kw != "condition") unsupported(kw);
    s.expect_char(':', "after 'condition'");

    rule.clauses.push_back(parse_clause(s, rule.patterns.size()));
    while (s.peek() != '}') {
        kw = s.read_ident("between clauses");
        if (kw != "or") unsupported(kw);
        rule.clauses.push_back(parse_clause(s, rule.patterns.size()));
    }
    s.expect_char('}', "to close the rule body");
    if (!s.at_end())
        throw FormatError("trailing content after rule: '" + s.next_token_preview() + "'");

    try {
        validate_rule(rule);
    } catch (const ArgumentError& e) {
        throw FormatError(e.what());
    }
    return rule;
}

}  // namespace sigforge
