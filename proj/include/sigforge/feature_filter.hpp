// Candidate gram filtering: drop padding-like, low-entropy, and
// background-common grams, then collapse grams that occur in exactly the
// same files down to the most distinctive representative.
#pragma once

#include <span>
#include <vector>

#include "sigforge/bloom.hpp"
#include "sigforge/ngram.hpp"
#include "sigforge/util.hpp"

namespace sigforge {

struct FeatureOccurrence {
    NGramFeature gram;
    FileSet file_set;  // sample ids containing the gram; never empty
};

// Rules, applied in order:
//   (a) at least half the bytes are 0x00 or 0xFF        -> padding, drop
//   (b) entropy <= 1.0 bits                             -> too plain, drop
//   (c) background filter knows the gram (estimate > 0) -> too common, drop
// then grams with identical file sets are grouped and only the highest
// entropy member survives (ties: lexicographically smallest bytes).
// Survivors keep their input order.
std::vector<FeatureOccurrence> filter_simple(std::span<const FeatureOccurrence> candidates,
                                             const CountingBloomFilter& filter);

}  // namespace sigforge
