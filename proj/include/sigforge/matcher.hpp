#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sigforge/yara_rule.hpp"

namespace sigforge {

struct MatchResult {
    bool matched = false;
    std::vector<bool> per_pattern_hits;
    std::vector<bool> per_clause_satisfied;
};

// Simultaneous multi-pattern scanner (Aho-Corasick) with presence
// semantics: a pattern counts once per file no matter how often or where it
// occurs. Build once, match many files; matching is const and thread-safe.
class RuleMatcher {
public:
    explicit RuleMatcher(const YaraRule& rule);

    MatchResult match(std::span<const std::uint8_t> data) const;

private:
    struct Node {
        // Sorted by byte for binary search.
        std::vector<std::pair<std::uint8_t, std::int32_t>> next;
        std::int32_t fail = 0;
        std::int32_t dict = -1;     // nearest suffix node ending a pattern
        std::int32_t pattern = -1;  // pattern ending exactly here
    };

    std::int32_t step(std::int32_t node, std::uint8_t byte) const;

    std::vector<Node> nodes_;
    std::vector<RuleClause> clauses_;
    std::size_t pattern_count_ = 0;
};

// One-shot convenience wrapper.
MatchResult match_file(const YaraRule& rule, std::span<const std::uint8_t> bytes);

}  // namespace sigforge
