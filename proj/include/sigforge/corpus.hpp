// Corpus scanning: enumerate sample files under a directory, digest them,
// and assign dense ids in a reproducible order. The manifest is the anchor
// every downstream stage keys on, so id assignment must never depend on
// filesystem enumeration order.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sigforge/util.hpp"

namespace sigforge {

struct SampleRef {
    std::uint32_t id = 0;              // dense, 0..N-1, assigned in path order
    std::filesystem::path path;
    std::uint64_t size = 0;
    std::string content_digest;        // SHA-256, lowercase hex
    // Set when another sample with a smaller id has the same digest and the
    // scan kept duplicates. Not serialized.
    std::optional<std::uint32_t> duplicate_of;
};

struct CorpusManifest {
    std::filesystem::path root;
    std::string label;                 // defaults to the root's basename
    std::string created_at;            // informational only, not serialized
    std::vector<SampleRef> samples;    // ordered by id

    std::size_t size() const { return samples.size(); }
};

// Walks root (recursively when asked), digests every regular file, and
// builds a manifest with ids assigned in lexicographic path order.
// dedup drops samples whose digest was already seen; otherwise they are kept
// and flagged via duplicate_of.
CorpusManifest scan_corpus(const std::filesystem::path& root, bool recursive = true,
                           bool dedup = false);

// Whole-file read. verify_digest re-hashes and fails on mismatch, which
// catches corpora modified between scan and use.
std::vector<std::uint8_t> load_bytes(const SampleRef& sample, bool verify_digest = false);

std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_file(const std::filesystem::path& path);

// Tab-separated manifest records: id, hex digest, size, path. LF endings.
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& out_path);
CorpusManifest read_manifest(const std::filesystem::path& path);

// A manifest plus every sample's bytes, for stages that sweep the same
// corpus repeatedly (one buffer per sample, indexed by id).
struct LoadedCorpus {
    CorpusManifest manifest;
    std::vector<std::vector<std::uint8_t>> data;
};

LoadedCorpus load_corpus(CorpusManifest manifest);

}  // namespace sigforge
