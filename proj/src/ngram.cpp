#include "sigforge/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>

namespace sigforge {
namespace {

// Published rolling-hash constants: FNV-1a prime as the polynomial base
// (odd, full period mod 2^64) and a fixed xor-out so raw byte values of
// short windows do not leak into bucket indices.
constexpr std::uint64_t kRollBase = 0x100000001B3ULL;
constexpr std::uint64_t kRollXorOut = 0x53494746524F4C4CULL;

constexpr std::size_t kTopOversample = 4;

struct GramStats {
    std::uint32_t doc_freq = 0;
    std::uint32_t last_file = 0xFFFFFFFFu;
};

void require_gram_size(std::uint32_t n) {
    if (!is_valid_gram_size(n))
        throw ArgumentError("gram size " + std::to_string(n) + " is not on the size ladder");
}

void require_k(std::uint32_t k) {
    if (k < 1) throw ArgumentError("k must be at least 1");
}

// Feeds file contents one sample at a time. The span stays valid only until
// the next call, which is all the two-pass scans need.
using FileFeed = std::function<std::span<const std::uint8_t>(std::size_t)>;

template <typename Map>
TopKResult finalize_top_k(Map& counts, std::uint32_t n, std::uint32_t k, bool exact) {
    std::vector<std::pair<std::string_view, std::uint32_t>> entries;
    entries.reserve(counts.size());
    for (const auto& [view, stats] : counts) entries.emplace_back(view, stats.doc_freq);

    auto better = [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    if (entries.size() > k) {
        std::nth_element(entries.begin(), entries.begin() + k, entries.end(), better);
        entries.resize(k);
    }
    std::sort(entries.begin(), entries.end(), better);

    TopKResult result;
    result.n = n;
    result.k_requested = k;
    result.exact = exact;
    result.grams.reserve(entries.size());
    for (const auto& [view, freq] : entries) {
        NGramFeature f;
        f.bytes.assign(view.begin(), view.end());
        f.n = n;
        f.doc_freq = freq;
        f.entropy = entropy(f.bytes);
        result.grams.push_back(std::move(f));
    }
    return result;
}

TopKResult top_k_exact_impl(const FileFeed& feed, std::size_t file_count, std::uint32_t n,
                            std::uint32_t k) {
    require_gram_size(n);
    require_k(k);

    // Keys view into per-file buffers, so buffers for all files must outlive
    // the map. Callers hand in a feed backed by a LoadedCorpus.
    std::unordered_map<std::string_view, GramStats> counts;
    for (std::size_t file = 0; file < file_count; ++file) {
        const auto bytes = feed(file);
        if (bytes.size() < n) continue;
        const char* base = reinterpret_cast<const char*>(bytes.data());
        for (std::size_t pos = 0; pos + n <= bytes.size(); ++pos) {
            auto& stats = counts[std::string_view(base + pos, n)];
            if (stats.last_file != file) {
                stats.last_file = static_cast<std::uint32_t>(file);
                ++stats.doc_freq;
            }
        }
    }
    return finalize_top_k(counts, n, k, /*exact=*/true);
}

TopKResult top_k_hashgram_impl(const FileFeed& feed, std::size_t file_count, std::uint32_t n,
                               std::uint32_t k, std::uint64_t bucket_budget,
                               std::uint32_t min_bucket_count,
                               std::uint64_t material_byte_limit) {
    require_gram_size(n);
    require_k(k);
    if (bucket_budget < 8ULL * k)
        throw ArgumentError("bucket_budget must be at least 8*k (got " +
                            std::to_string(bucket_budget) + " for k=" + std::to_string(k) + ")");

    // Pass 1: per-file-deduped hash counts in a fixed counter array.
    std::vector<std::uint32_t> buckets(bucket_budget, 0);
    std::vector<std::uint64_t> scratch;
    for (std::size_t file = 0; file < file_count; ++file) {
        const auto bytes = feed(file);
        scratch = rolling_hashes(bytes, n);
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        for (std::uint64_t h : scratch) ++buckets[h % bucket_budget];
    }

    // Keep the k*OVERSAMPLE fullest buckets (ties resolved toward lower
    // bucket index), after dropping buckets under the caller's count floor.
    // Because per-file dedup caps every count at file_count, the selection
    // order (count descending, index ascending) falls out of one histogram
    // sweep with no sort.
    //
    // A bucket with count c holds at most c distinct grams, so the running
    // sum of selected counts bounds pass-2 map residency; the prefix stops
    // early once that bound would cross material_byte_limit. Heavy grams
    // live in the fullest buckets and are kept; what the cap sheds is the
    // long doc-freq-1 tail that could not survive top-k anyway.
    const std::uint32_t floor_count = std::max<std::uint32_t>(min_bucket_count, 1);
    std::uint32_t max_count = 0;
    for (std::uint64_t i = 0; i < bucket_budget; ++i) max_count = std::max(max_count, buckets[i]);
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(max_count) + 1, 0);
    for (std::uint64_t i = 0; i < bucket_budget; ++i)
        if (buckets[i] >= floor_count) ++hist[buckets[i]];

    const std::uint64_t gram_cost = n + 128;  // map node + key storage estimate
    std::uint64_t bucket_quota = kTopOversample * static_cast<std::uint64_t>(k);
    std::uint64_t byte_quota = std::max<std::uint64_t>(material_byte_limit, gram_cost);
    std::uint32_t full_above = 0;     // counts strictly above this are all kept
    std::uint64_t boundary_take = 0;  // buckets to keep at count == full_above
    for (std::uint32_t c = max_count; c >= floor_count && c > 0; --c) {
        const std::uint64_t per_bucket = c * gram_cost;
        const std::uint64_t fit = std::min<std::uint64_t>(hist[c],
                                                          std::min(bucket_quota, byte_quota / per_bucket));
        if (fit < hist[c]) {
            full_above = c;
            boundary_take = fit;
            break;
        }
        bucket_quota -= fit;
        byte_quota -= fit * per_bucket;
        if (c == floor_count) {
            full_above = c - 1;
            boundary_take = 0;
        }
    }
    if (max_count < floor_count) {
        full_above = max_count;
        boundary_take = 0;
    }

    std::vector<std::uint8_t> selected(bucket_budget, 0);
    for (std::uint64_t i = 0; i < bucket_budget; ++i) {
        if (buckets[i] > full_above)
            selected[i] = 1;
        else if (buckets[i] == full_above && full_above >= floor_count && boundary_take > 0) {
            selected[i] = 1;
            --boundary_take;
        }
    }
    buckets.clear();
    buckets.shrink_to_fit();

    // Pass 2: exact doc frequencies for grams landing in selected buckets.
    std::unordered_map<std::string, GramStats> counts;
    for (std::size_t file = 0; file < file_count; ++file) {
        const auto bytes = feed(file);
        const auto hashes = rolling_hashes(bytes, n);
        const char* base = reinterpret_cast<const char*>(bytes.data());
        for (std::size_t pos = 0; pos < hashes.size(); ++pos) {
            if (!selected[hashes[pos] % bucket_budget]) continue;
            auto& stats = counts[std::string(base + pos, n)];
            if (stats.last_file != file) {
                stats.last_file = static_cast<std::uint32_t>(file);
                ++stats.doc_freq;
            }
        }
    }
    return finalize_top_k(counts, n, k, /*exact=*/false);
}

FileFeed streaming_feed(const CorpusManifest& manifest,
                        std::shared_ptr<std::vector<std::uint8_t>> scratch) {
    return [&manifest, scratch](std::size_t i) -> std::span<const std::uint8_t> {
        *scratch = load_bytes(manifest.samples[i]);
        return *scratch;
    };
}

FileFeed loaded_feed(const LoadedCorpus& corpus) {
    return [&corpus](std::size_t i) -> std::span<const std::uint8_t> { return corpus.data[i]; };
}

}  // namespace

bool is_valid_gram_size(std::uint32_t n) {
    return std::find(kGramSizes.begin(), kGramSizes.end(), n) != kGramSizes.end();
}

double entropy(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw ArgumentError("entropy of an empty sequence is undefined");
    std::array<std::uint64_t, 256> histogram{};
    for (std::uint8_t b : bytes) ++histogram[b];
    const double total = static_cast<double>(bytes.size());
    double h = 0.0;
    for (std::uint64_t count : histogram) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / total;
        h -= p * std::log2(p);
    }
    return h;
}

std::vector<std::uint64_t> rolling_hashes(std::span<const std::uint8_t> bytes, std::uint32_t n) {
    if (n == 0) throw ArgumentError("gram size must be positive");
    std::vector<std::uint64_t> out;
    if (bytes.size() < n) return out;
    out.reserve(bytes.size() - n + 1);

    std::uint64_t top = 1;  // kRollBase^(n-1), for removing the outgoing byte
    for (std::uint32_t i = 0; i + 1 < n; ++i) top *= kRollBase;

    std::uint64_t h = 0;
    for (std::uint32_t i = 0; i < n; ++i) h = h * kRollBase + bytes[i];
    out.push_back(h ^ kRollXorOut);
    for (std::size_t pos = n; pos < bytes.size(); ++pos) {
        h = (h - bytes[pos - n] * top) * kRollBase + bytes[pos];
        out.push_back(h ^ kRollXorOut);
    }
    return out;
}

TopKResult top_k_exact(const CorpusManifest& manifest, std::uint32_t n, std::uint32_t k) {
    // The exact path keys the count map on views into sample buffers, so it
    // needs every buffer resident at once.
    return top_k_exact(load_corpus(manifest), n, k);
}

TopKResult top_k_exact(const LoadedCorpus& corpus, std::uint32_t n, std::uint32_t k) {
    return top_k_exact_impl(loaded_feed(corpus), corpus.data.size(), n, k);
}

TopKResult top_k_hashgram(const CorpusManifest& manifest, std::uint32_t n, std::uint32_t k,
                          std::uint64_t bucket_budget, std::uint32_t min_bucket_count,
                          std::uint64_t material_byte_limit) {
    auto scratch = std::make_shared<std::vector<std::uint8_t>>();
    return top_k_hashgram_impl(streaming_feed(manifest, scratch), manifest.samples.size(), n, k,
                               bucket_budget, min_bucket_count, material_byte_limit);
}

TopKResult top_k_hashgram(const LoadedCorpus& corpus, std::uint32_t n, std::uint32_t k,
                          std::uint64_t bucket_budget, std::uint32_t min_bucket_count,
                          std::uint64_t material_byte_limit) {
    return top_k_hashgram_impl(loaded_feed(corpus), corpus.data.size(), n, k, bucket_budget,
                               min_bucket_count, material_byte_limit);
}

TopKResult top_k(const LoadedCorpus& corpus, std::uint32_t n, const TopKParams& params) {
    bool exact = params.mode != TopKMode::HashGram;
    if (params.mode == TopKMode::Auto) {
        std::uint64_t total = 0;
        for (const auto& s : corpus.manifest.samples) total += s.size;
        exact = total <= params.exact_byte_limit;
    }
    if (exact) return top_k_exact(corpus, n, params.k);
    return top_k_hashgram(corpus, n, params.k, params.bucket_budget, params.min_bucket_count,
                          params.material_byte_limit);
}

std::vector<FileSet> occurrences(const LoadedCorpus& corpus,
                                 std::span<const NGramFeature> grams) {
    const std::size_t file_count = corpus.data.size();
    std::vector<FileSet> result(grams.size(), FileSet(file_count));
    if (grams.empty()) return result;

    const std::uint32_t n = grams.front().n;
    for (const auto& g : grams)
        if (g.n != n || g.bytes.size() != n)
            throw ArgumentError("occurrence scan requires grams of one shared size");

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_hash;
    for (std::size_t i = 0; i < grams.size(); ++i)
        by_hash[rolling_hashes(grams[i].bytes, n).front()].push_back(
            static_cast<std::uint32_t>(i));

    std::vector<std::vector<std::uint32_t>> hits_per_file(file_count);
    parallel_for(file_count, [&](std::size_t file) {
        const auto& bytes = corpus.data[file];
        const auto hashes = rolling_hashes(bytes, n);
        std::vector<std::uint8_t> seen(grams.size(), 0);
        for (std::size_t pos = 0; pos < hashes.size(); ++pos) {
            const auto it = by_hash.find(hashes[pos]);
            if (it == by_hash.end()) continue;
            for (std::uint32_t gi : it->second) {
                if (seen[gi]) continue;
                if (std::memcmp(grams[gi].bytes.data(), bytes.data() + pos, n) == 0) {
                    seen[gi] = 1;
                    hits_per_file[file].push_back(gi);
                }
            }
        }
    });
    for (std::size_t file = 0; file < file_count; ++file)
        for (std::uint32_t gi : hits_per_file[file]) result[gi].set(file);
    return result;
}

}  // namespace sigforge
