#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sigforge {

// One condition clause: at least threshold_t of the referenced patterns
// must be present in a file.
struct RuleClause {
    int threshold_t = 1;
    std::vector<int> feature_ids;

    friend bool operator==(const RuleClause&, const RuleClause&) = default;
};

// Where a rule came from. Advisory only; not part of the rule text and
// ignored by structural equality.
struct RuleProvenance {
    std::uint32_t n = 0;
    std::string normalization;
    double coverage = 0.0;
    double score = 0.0;
};

// A rule in the emitted grammar subset: literal hex string patterns named
// $x0..$x<P-1> and a condition that ORs threshold clauses.
struct YaraRule {
    std::string name;
    std::vector<std::vector<std::uint8_t>> patterns;
    std::vector<RuleClause> clauses;
    RuleProvenance provenance;

    friend bool operator==(const YaraRule& a, const YaraRule& b) {
        return a.name == b.name && a.patterns == b.patterns && a.clauses == b.clauses;
    }
};

// Clamps a name into [A-Za-z_][A-Za-z0-9_]*: every other character becomes
// '_', a leading digit gets a '_' prefix, empty input becomes "unnamed".
std::string sanitize_identifier(const std::string& name);

// Canonical text form. Parsing the output and emitting again reproduces the
// text byte for byte.
std::string emit_yara(const YaraRule& rule);

// Inverse of emit_yara over the grammar subset; whitespace between tokens is
// free-form. Constructs outside the subset (wildcards, modifiers, module
// references) raise FormatError naming the offending token.
YaraRule parse_rule(const std::string& text);

}  // namespace sigforge
