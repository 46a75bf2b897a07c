// Shared low-level pieces: error types, deterministic RNG and hashing,
// CRC-32C, a compact bitset keyed by sample id, and bounded parallelism.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigforge {

// Error taxonomy. The CLI maps these onto process exit codes, the library
// just throws.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a stage cannot proceed for lack of signal (e.g. a matrix with
// fewer than two rows or columns). Callers that probe many configurations
// catch this and move on; it is not a hard failure.
struct InsufficientSignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64: tiny, seedable, identical output on every platform. Used for
// every random draw in the project so runs are reproducible bit for bit.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased enough for test-data generation; not used where exact
    // uniformity matters.
    std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }

    std::uint8_t next_byte() { return static_cast<std::uint8_t>(next() & 0xFF); }

    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Seeded 64-bit content hash (FNV-1a core, splitmix finalizer for avalanche).
// Deterministic across platforms; this exact function is part of the Bloom
// filter's on-disk contract, do not change it.
inline std::uint64_t hash64(std::span<const std::uint8_t> data, std::uint64_t seed) {
    std::uint64_t h = seed ^ 0xCBF29CE484222325ULL;
    for (std::uint8_t b : data) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
    h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
    return h ^ (h >> 31);
}

// CRC-32C (Castagnoli polynomial), bit-reflected, init/xorout 0xFFFFFFFF.
std::uint32_t crc32c(std::span<const std::uint8_t> data, std::uint32_t crc = 0);

std::string to_hex(std::span<const std::uint8_t> bytes, bool uppercase = false);

// Fixed-capacity bitset over sample ids. Equality and hashing are by value,
// which the feature dedup step relies on.
class FileSet {
public:
    FileSet() = default;
    explicit FileSet(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return nbits_; }

    void set(std::size_t i) { words_[i >> 6] |= 1ULL << (i & 63); }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

    bool any() const {
        for (std::uint64_t w : words_)
            if (w) return true;
        return false;
    }

    std::vector<std::uint32_t> members() const {
        std::vector<std::uint32_t> out;
        for (std::size_t i = 0; i < nbits_; ++i)
            if (test(i)) out.push_back(static_cast<std::uint32_t>(i));
        return out;
    }

    std::uint64_t value_hash() const {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ nbits_;
        for (std::uint64_t w : words_) {
            h ^= w;
            h *= 0x100000001B3ULL;
            h ^= h >> 29;
        }
        return h;
    }

    friend bool operator==(const FileSet&, const FileSet&) = default;

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

// Worker count for data-parallel loops: hardware concurrency, capped by the
// SIGFORGE_THREADS environment variable when set.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on worker_count() threads. Blocks until done.
// fn must be safe to call concurrently for distinct i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sigforge
