#include "sigforge/matcher.hpp"

#include <algorithm>
#include <deque>

#include "sigforge/util.hpp"

namespace sigforge {

RuleMatcher::RuleMatcher(const YaraRule& rule)
    : clauses_(rule.clauses), pattern_count_(rule.patterns.size()) {
    if (rule.patterns.empty()) throw ArgumentError("matcher needs at least one pattern");

    nodes_.emplace_back();
    for (std::size_t p = 0; p < rule.patterns.size(); ++p) {
        std::int32_t node = 0;
        for (std::uint8_t b : rule.patterns[p]) {
            auto& next = nodes_[node].next;
            auto it = std::lower_bound(next.begin(), next.end(), b,
                                       [](const auto& e, std::uint8_t v) { return e.first < v; });
            if (it != next.end() && it->first == b) {
                node = it->second;
            } else {
                const auto child = static_cast<std::int32_t>(nodes_.size());
                nodes_[node].next.insert(it, {b, child});
                nodes_.emplace_back();
                node = child;
            }
        }
        nodes_[node].pattern = static_cast<std::int32_t>(p);
    }

    // Breadth-first failure links; dict links chain to the nearest suffix
    // that ends some pattern.
    std::deque<std::int32_t> queue;
    for (const auto& [b, child] : nodes_[0].next) {
        nodes_[child].fail = 0;
        queue.push_back(child);
    }
    while (!queue.empty()) {
        const std::int32_t node = queue.front();
        queue.pop_front();
        for (const auto& [b, child] : nodes_[node].next) {
            const std::int32_t f = step(nodes_[node].fail, b);
            nodes_[child].fail = f;
            nodes_[child].dict = nodes_[f].pattern >= 0 ? f : nodes_[f].dict;
            queue.push_back(child);
        }
    }
}

std::int32_t RuleMatcher::step(std::int32_t node, std::uint8_t byte) const {
    while (true) {
        const auto& next = nodes_[node].next;
        auto it = std::lower_bound(next.begin(), next.end(), byte,
                                   [](const auto& e, std::uint8_t v) { return e.first < v; });
        if (it != next.end() && it->first == byte) return it->second;
        if (node == 0) return 0;
        node = nodes_[node].fail;
    }
}

MatchResult RuleMatcher::match(std::span<const std::uint8_t> data) const {
    MatchResult result;
    result.per_pattern_hits.assign(pattern_count_, false);

    std::size_t remaining = pattern_count_;
    std::int32_t node = 0;
    for (std::uint8_t byte : data) {
        node = step(node, byte);
        for (std::int32_t end = nodes_[node].pattern >= 0 ? node : nodes_[node].dict;
             end >= 0; end = nodes_[end].dict) {
            if (!result.per_pattern_hits[nodes_[end].pattern]) {
                result.per_pattern_hits[nodes_[end].pattern] = true;
                --remaining;
            }
        }
        if (remaining == 0) break;
    }

    result.per_clause_satisfied.reserve(clauses_.size());
    for (const auto& clause : clauses_) {
        int hits = 0;
        for (int id : clause.feature_ids) hits += result.per_pattern_hits[id] ? 1 : 0;
        const bool ok = hits >= clause.threshold_t;
        result.per_clause_satisfied.push_back(ok);
        result.matched = result.matched || ok;
    }
    return result;
}

MatchResult match_file(const YaraRule& rule, std::span<const std::uint8_t> bytes) {
    return RuleMatcher(rule).match(bytes);
}

}  // namespace sigforge
