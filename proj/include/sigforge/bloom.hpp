// Background-frequency index: one counting Bloom filter per gram size,
// holding the grams that are common across a large training corpus. The
// feature filter treats anything the index knows about as background noise.
//
// Counters are 16-bit saturating; queries return the minimum over the probe
// positions, so an inserted gram is never under-reported (one-sided error).
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "sigforge/corpus.hpp"
#include "sigforge/ngram.hpp"
#include "sigforge/util.hpp"

namespace sigforge {

class CountingBloomFilter {
public:
    // num_counters must be a power of two, num_hashes in [2, 8].
    CountingBloomFilter(std::uint32_t n, std::uint64_t num_counters, std::uint32_t num_hashes,
                        std::uint64_t seed);

    std::uint32_t n() const { return n_; }
    std::uint64_t num_counters() const { return counters_.size(); }
    std::uint32_t num_hashes() const { return num_hashes_; }
    std::uint64_t seed() const { return seed_; }
    std::span<const std::uint16_t> counters() const { return counters_; }
    std::span<std::uint16_t> counters_mut() { return counters_; }

    void insert(std::span<const std::uint8_t> gram, std::uint32_t count);
    std::uint32_t query(std::span<const std::uint8_t> gram) const;

    friend bool operator==(const CountingBloomFilter&, const CountingBloomFilter&) = default;

private:
    void probe_positions(std::span<const std::uint8_t> gram,
                         std::span<std::uint64_t> out) const;

    std::uint32_t n_;
    std::uint32_t num_hashes_;
    std::uint64_t seed_;
    std::uint64_t mask_;
    std::vector<std::uint16_t> counters_;
};

struct BloomIndex {
    std::map<std::uint32_t, CountingBloomFilter> filters;  // keyed by n
    std::uint64_t train_file_count = 0;
    double min_doc_frac = 0.001;
    std::string built_from;  // descriptor only, not persisted

    const CountingBloomFilter& filter_for(std::uint32_t n) const;
};

struct BuildIndexParams {
    std::uint32_t k = 1'000'000;
    double min_doc_frac = 0.001;
    std::uint32_t log2_counters = 24;   // 2^24 u16 counters = 32 MiB per filter
    std::uint32_t num_hashes = 7;
    std::uint64_t seed = 0x534947464F524745ULL;
    TopKMode mode = TopKMode::Auto;
    std::uint64_t bucket_budget = 1ULL << 23;
    std::uint32_t max_n = 1024;         // build filters for ladder sizes <= max_n
};

// For each ladder size: top-k grams over the training corpus, keep those in
// strictly more than min_doc_frac of the files, insert with their counts.
BloomIndex build_index(const CorpusManifest& manifest, const BuildIndexParams& params = {});
BloomIndex build_index(const CorpusManifest& manifest, std::uint32_t k, double min_doc_frac);

// Little-endian container with a trailing CRC-32C; load rejects anything
// with a bad magic, version, truncation, or checksum.
void save_index(const BloomIndex& index, const std::filesystem::path& path);
BloomIndex load_index(const std::filesystem::path& path);

}  // namespace sigforge
