#include "sigforge/bloom.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace sigforge {
namespace {

constexpr char kMagic[4] = {'A', 'Y', 'B', 'F'};
constexpr std::uint32_t kFormatVersion = 1;

// Streams bytes out while folding them into a running CRC-32C, so the
// trailing checksum covers the whole payload without buffering it.
class ChecksumWriter {
public:
    explicit ChecksumWriter(const std::filesystem::path& path)
        : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw IoError("cannot open index for writing: " + path.string());
    }

    void bytes(std::span<const std::uint8_t> data) {
        out_.write(reinterpret_cast<const char*>(data.data()),
                   static_cast<std::streamsize>(data.size()));
        crc_ = crc32c(data, crc_);
    }

    void u32(std::uint32_t v) { fixed<4>(v); }
    void u64(std::uint64_t v) { fixed<8>(v); }
    void f64(double v) { fixed<8>(std::bit_cast<std::uint64_t>(v)); }

    void finish() {
        std::uint8_t buf[4];
        for (int i = 0; i < 4; ++i) buf[i] = static_cast<std::uint8_t>(crc_ >> (8 * i));
        out_.write(reinterpret_cast<const char*>(buf), 4);
        out_.flush();
        if (!out_) throw IoError("index write failed: " + path_.string());
    }

private:
    template <int Bytes, typename T>
    void fixed(T v) {
        std::uint8_t buf[Bytes];
        for (int i = 0; i < Bytes; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
        bytes(std::span<const std::uint8_t>(buf, Bytes));
    }

    std::ofstream out_;
    std::filesystem::path path_;
    std::uint32_t crc_ = 0;
};

class ChecksumReader {
public:
    explicit ChecksumReader(const std::filesystem::path& path)
        : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw IoError("cannot open index: " + path.string());
        in_.seekg(0, std::ios::end);
        remaining_ = static_cast<std::uint64_t>(in_.tellg());
        in_.seekg(0);
        if (remaining_ < 4) throw FormatError("index file truncated: " + path.string());
        remaining_ -= 4;  // trailing checksum is not part of the payload
    }

    void bytes(std::span<std::uint8_t> out) {
        if (out.size() > remaining_)
            throw FormatError("index file truncated: " + path_.string());
        in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
        if (!in_) throw FormatError("index file truncated: " + path_.string());
        remaining_ -= out.size();
        crc_ = crc32c(out, crc_);
    }

    std::uint32_t u32() { return static_cast<std::uint32_t>(fixed<4>()); }
    std::uint64_t u64() { return fixed<8>(); }
    double f64() { return std::bit_cast<double>(fixed<8>()); }

    std::uint64_t remaining() const { return remaining_; }

    void verify_checksum() {
        if (remaining_ != 0) throw FormatError("index has trailing garbage: " + path_.string());
        std::uint8_t buf[4];
        in_.read(reinterpret_cast<char*>(buf), 4);
        if (!in_) throw FormatError("index file truncated: " + path_.string());
        std::uint32_t stored = 0;
        for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
        if (stored != crc_)
            throw FormatError("index checksum mismatch (corrupt file): " + path_.string());
    }

private:
    template <int Bytes>
    std::uint64_t fixed() {
        std::uint8_t buf[Bytes];
        bytes(std::span<std::uint8_t>(buf, Bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < Bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return v;
    }

    std::ifstream in_;
    std::filesystem::path path_;
    std::uint64_t remaining_ = 0;
    std::uint32_t crc_ = 0;
};

std::uint64_t filter_seed(std::uint64_t master, std::uint32_t n) {
    return SplitMix64(master ^ (0x6E00ULL + n)).next();
}

}  // namespace

CountingBloomFilter::CountingBloomFilter(std::uint32_t n, std::uint64_t num_counters,
                                         std::uint32_t num_hashes, std::uint64_t seed)
    : n_(n), num_hashes_(num_hashes), seed_(seed) {
    if (!std::has_single_bit(num_counters))
        throw ArgumentError("num_counters must be a power of two");
    if (num_hashes < 2 || num_hashes > 8)
        throw ArgumentError("num_hashes must be between 2 and 8");
    mask_ = num_counters - 1;
    counters_.assign(num_counters, 0);
}

void CountingBloomFilter::probe_positions(std::span<const std::uint8_t> gram,
                                          std::span<std::uint64_t> out) const {
    if (gram.size() != n_)
        throw ArgumentError("gram length " + std::to_string(gram.size()) +
                            " does not match filter n=" + std::to_string(n_));
    const std::uint64_t h1 = hash64(gram, seed_);
    const std::uint64_t h2 = hash64(gram, seed_ ^ 0x9E3779B97F4A7C15ULL) | 1ULL;  // odd: full cycle
    for (std::uint32_t i = 0; i < num_hashes_; ++i) out[i] = (h1 + i * h2) & mask_;
}

void CountingBloomFilter::insert(std::span<const std::uint8_t> gram, std::uint32_t count) {
    if (count < 1) throw ArgumentError("insert count must be at least 1");
    std::uint64_t pos[8];
    probe_positions(gram, std::span<std::uint64_t>(pos, num_hashes_));
    for (std::uint32_t i = 0; i < num_hashes_; ++i) {
        const std::uint32_t sum = counters_[pos[i]] + count;
        counters_[pos[i]] = static_cast<std::uint16_t>(std::min<std::uint32_t>(sum, 0xFFFF));
    }
}

std::uint32_t CountingBloomFilter::query(std::span<const std::uint8_t> gram) const {
    std::uint64_t pos[8];
    probe_positions(gram, std::span<std::uint64_t>(pos, num_hashes_));
    std::uint32_t estimate = 0xFFFFFFFFu;
    for (std::uint32_t i = 0; i < num_hashes_; ++i)
        estimate = std::min<std::uint32_t>(estimate, counters_[pos[i]]);
    return estimate;
}

const CountingBloomFilter& BloomIndex::filter_for(std::uint32_t n) const {
    const auto it = filters.find(n);
    if (it == filters.end())
        throw ArgumentError("index has no filter for n=" + std::to_string(n));
    return it->second;
}

BloomIndex build_index(const CorpusManifest& manifest, const BuildIndexParams& params) {
    if (manifest.samples.empty()) throw ArgumentError("cannot build an index from an empty corpus");

    std::uint64_t total_bytes = 0;
    for (const auto& s : manifest.samples) total_bytes += s.size;
    TopKParams top_params;
    top_params.k = params.k;
    top_params.mode = params.mode;
    top_params.bucket_budget = params.bucket_budget;
    const bool exact = params.mode == TopKMode::Exact ||
                       (params.mode == TopKMode::Auto && total_bytes <= top_params.exact_byte_limit);

    // The exact path wants all buffers resident anyway; keep them loaded
    // across the ladder sweep. The heavy-hitter path streams per n instead.
    LoadedCorpus corpus;
    if (exact) corpus = load_corpus(manifest);

    BloomIndex index;
    index.train_file_count = manifest.samples.size();
    index.min_doc_frac = params.min_doc_frac;
    index.built_from = manifest.label;

    const double min_docs =
        params.min_doc_frac * static_cast<double>(manifest.samples.size());
    // Smallest doc frequency that can pass the insert cut below. Handing it
    // to the heavy-hitter scan as a bucket floor keeps pass 2 from
    // materializing grams that could never be inserted.
    std::int64_t floor_docs = static_cast<std::int64_t>(std::floor(min_docs)) + 1;
    if (floor_docs < 1) floor_docs = 1;
    const auto bucket_floor = static_cast<std::uint32_t>(
        std::min<std::int64_t>(floor_docs, std::numeric_limits<std::uint32_t>::max()));

    for (std::uint32_t n : kGramSizes) {
        if (n > params.max_n) break;
        const TopKResult top =
            exact ? top_k_exact(corpus, n, params.k)
                  : top_k_hashgram(manifest, n, params.k, params.bucket_budget, bucket_floor);
        CountingBloomFilter filter(n, 1ULL << params.log2_counters, params.num_hashes,
                                   filter_seed(params.seed, n));
        for (const auto& gram : top.grams) {
            if (static_cast<double>(gram.doc_freq) > min_docs)
                filter.insert(gram.bytes, gram.doc_freq);
        }
        index.filters.emplace(n, std::move(filter));
    }
    return index;
}

BloomIndex build_index(const CorpusManifest& manifest, std::uint32_t k, double min_doc_frac) {
    BuildIndexParams params;
    params.k = k;
    params.min_doc_frac = min_doc_frac;
    return build_index(manifest, params);
}

void save_index(const BloomIndex& index, const std::filesystem::path& path) {
    ChecksumWriter writer(path);
    writer.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
    writer.u32(kFormatVersion);
    writer.u64(index.train_file_count);
    writer.f64(index.min_doc_frac);
    writer.u32(static_cast<std::uint32_t>(index.filters.size()));
    for (const auto& [n, filter] : index.filters) {
        writer.u32(n);
        writer.u64(filter.num_counters());
        writer.u32(filter.num_hashes());
        writer.u64(filter.seed());
        // Counters as little-endian u16, in one block per filter.
        const auto counters = filter.counters();
        std::vector<std::uint8_t> block(counters.size() * 2);
        for (std::size_t i = 0; i < counters.size(); ++i) {
            block[2 * i] = static_cast<std::uint8_t>(counters[i] & 0xFF);
            block[2 * i + 1] = static_cast<std::uint8_t>(counters[i] >> 8);
        }
        writer.bytes(block);
    }
    writer.finish();
}

BloomIndex load_index(const std::filesystem::path& path) {
    ChecksumReader reader(path);
    std::uint8_t magic[4];
    reader.bytes(magic);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("not an index file (bad magic): " + path.string());
    const std::uint32_t version = reader.u32();
    if (version != kFormatVersion)
        throw FormatError("unsupported index format version " + std::to_string(version) + ": " +
                          path.string());

    BloomIndex index;
    index.train_file_count = reader.u64();
    index.min_doc_frac = reader.f64();
    const std::uint32_t filter_count = reader.u32();
    for (std::uint32_t f = 0; f < filter_count; ++f) {
        const std::uint32_t n = reader.u32();
        const std::uint64_t num_counters = reader.u64();
        const std::uint32_t num_hashes = reader.u32();
        const std::uint64_t seed = reader.u64();
        if (!is_valid_gram_size(n))
            throw FormatError("index filter has off-ladder n=" + std::to_string(n) + ": " +
                              path.string());
        if (!std::has_single_bit(num_counters) || num_hashes < 2 || num_hashes > 8)
            throw FormatError("index filter geometry invalid: " + path.string());
        if (index.filters.count(n))
            throw FormatError("index has duplicate filter for n=" + std::to_string(n) + ": " +
                              path.string());
        CountingBloomFilter filter(n, num_counters, num_hashes, seed);
        std::vector<std::uint8_t> block(num_counters * 2);
        reader.bytes(block);
        auto counters = filter.counters_mut();
        for (std::size_t i = 0; i < counters.size(); ++i)
            counters[i] = static_cast<std::uint16_t>(block[2 * i] |
                                                     (static_cast<std::uint16_t>(block[2 * i + 1])
                                                      << 8));
        index.filters.emplace(n, std::move(filter));
    }
    reader.verify_checksum();
    return index;
}

}  // namespace sigforge
