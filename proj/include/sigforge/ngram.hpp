// Large byte n-gram extraction. Frequencies are document frequencies (a gram
// counts once per file no matter how often it repeats inside), because rule
// matching downstream is a per-file boolean.
//
// Two extraction paths share one output contract:
//   exact     - full gram -> file-set map, feasible for small corpora
//   hashgram  - two-pass heavy hitters over a fixed counter array, for
//               corpora too large to hold distinct grams in memory
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sigforge/corpus.hpp"
#include "sigforge/util.hpp"

namespace sigforge {

// The gram size ladder. Sizes outside it are rejected by the top-k entry
// points (entropy and rolling hashes accept any length).
inline constexpr std::array<std::uint32_t, 8> kGramSizes = {8, 16, 32, 64, 128, 256, 512, 1024};

bool is_valid_gram_size(std::uint32_t n);

struct NGramFeature {
    std::vector<std::uint8_t> bytes;
    std::uint32_t n = 0;
    std::uint32_t doc_freq = 0;
    double entropy = 0.0;
};

struct TopKResult {
    std::uint32_t n = 0;
    std::uint32_t k_requested = 0;
    // Sorted by doc_freq descending, ties by bytes ascending.
    std::vector<NGramFeature> grams;
    bool exact = true;
};

// Shannon entropy of the byte histogram, log base 2, so the result lives in
// [0, 8] bits per byte.
double entropy(std::span<const std::uint8_t> bytes);

// Polynomial rolling hash over a fixed odd 64-bit multiplier, one value per
// window position (empty when the input is shorter than n). Identical
// windows always collide; unrelated windows collide with ~2^-64 probability.
std::vector<std::uint64_t> rolling_hashes(std::span<const std::uint8_t> bytes, std::uint32_t n);

enum class TopKMode { Auto, Exact, HashGram };

struct TopKParams {
    std::uint32_t k = 1024;
    TopKMode mode = TopKMode::Auto;
    std::uint64_t bucket_budget = 1ULL << 20;
    // Auto picks the exact path when total corpus bytes fit under this cap.
    // The exact path holds one map node per distinct gram, so the cap also
    // bounds its memory.
    std::uint64_t exact_byte_limit = 16ULL << 20;
    // Hashgram only: skip buckets whose first-pass count is below this, so
    // their grams are never materialized in pass 2. A bucket count bounds the
    // doc frequency of every gram in it from above, which lets callers that
    // post-filter by a frequency floor (the background index build) discard
    // provably sub-threshold grams without the second-pass memory cost.
    // 0 keeps everything.
    std::uint32_t min_bucket_count = 0;
    // Hashgram only: cap on worst-case pass-2 map memory. Counts are
    // per-file deduped, so a bucket's count bounds the distinct grams it can
    // hold; the selection prefix is truncated (fullest buckets first) once
    // the summed bound would exceed this. On corpora dominated by
    // doc-freq-1 grams the cap sheds only noise-tier buckets.
    std::uint64_t material_byte_limit = 256ULL << 20;
};

TopKResult top_k_exact(const CorpusManifest& manifest, std::uint32_t n, std::uint32_t k);
TopKResult top_k_exact(const LoadedCorpus& corpus, std::uint32_t n, std::uint32_t k);

TopKResult top_k_hashgram(const CorpusManifest& manifest, std::uint32_t n, std::uint32_t k,
                          std::uint64_t bucket_budget, std::uint32_t min_bucket_count = 0,
                          std::uint64_t material_byte_limit = 256ULL << 20);
TopKResult top_k_hashgram(const LoadedCorpus& corpus, std::uint32_t n, std::uint32_t k,
                          std::uint64_t bucket_budget, std::uint32_t min_bucket_count = 0,
                          std::uint64_t material_byte_limit = 256ULL << 20);

TopKResult top_k(const LoadedCorpus& corpus, std::uint32_t n, const TopKParams& params);

// Exact per-sample presence of each gram (all grams must share one length).
// One pass per file via rolling hashes with byte-level confirmation, so the
// result is exact even under hash collisions.
std::vector<FileSet> occurrences(const LoadedCorpus& corpus,
                                 std::span<const NGramFeature> grams);

}  // namespace sigforge
