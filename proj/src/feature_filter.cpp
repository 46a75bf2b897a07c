#include "sigforge/feature_filter.hpp"

#include <algorithm>
#include <unordered_map>

namespace sigforge {
namespace {

std::size_t padding_bytes(std::span<const std::uint8_t> bytes) {
    std::size_t z = 0;
    for (std::uint8_t b : bytes)
        if (b == 0x00 || b == 0xFF) ++z;
    return z;
}

}  // namespace

std::vector<FeatureOccurrence> filter_simple(std::span<const FeatureOccurrence> candidates,
                                             const CountingBloomFilter& filter) {
    for (const auto& c : candidates)
        if (c.gram.bytes.size() != filter.n())
            throw ArgumentError("filter_simple requires a single gram size matching the filter");

    // Rule-based removal first; survivors carry their original position.
    std::vector<std::size_t> kept;
    kept.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& g = candidates[i].gram;
        if (2 * padding_bytes(g.bytes) >= g.bytes.size()) continue;   // (a), z >= |g|/2
        if (g.entropy <= 1.0) continue;                               // (b), inclusive
        if (filter.query(g.bytes) > 0) continue;                      // (c)
        kept.push_back(i);
    }

    // Group by exact file set; one representative per group.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> groups;
    for (std::size_t i : kept) groups[candidates[i].file_set.value_hash()].push_back(i);

    auto outranks = [&](std::size_t a, std::size_t b) {
        const auto& ga = candidates[a].gram;
        const auto& gb = candidates[b].gram;
        if (ga.entropy != gb.entropy) return ga.entropy > gb.entropy;
        return ga.bytes < gb.bytes;
    };

    std::vector<bool> survives(candidates.size(), false);
    for (std::size_t i : kept) survives[i] = true;
    for (auto& [hash, members] : groups) {
        if (members.size() < 2) continue;
        // Hash buckets can mix distinct file sets; resolve winners per
        // actual set value.
        std::unordered_map<std::size_t, std::size_t> winner_by_set;  // member idx -> winner idx
        std::vector<std::size_t> set_representatives;
        for (std::size_t i : members) {
            bool found = false;
            for (std::size_t rep : set_representatives) {
                if (candidates[rep].file_set == candidates[i].file_set) {
                    std::size_t& best = winner_by_set[rep];
                    if (outranks(i, best)) {
                        survives[best] = false;
                        best = i;
                    } else {
                        survives[i] = false;
                    }
                    found = true;
                    break;
                }
            }
            if (!found) {
                set_representatives.push_back(i);
                winner_by_set[i] = i;
            }
        }
    }

    std::vector<FeatureOccurrence> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (survives[i]) out.push_back(candidates[i]);
    return out;
}

}  // namespace sigforge
