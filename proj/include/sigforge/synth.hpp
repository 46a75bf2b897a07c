#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sigforge/corpus.hpp"

namespace sigforge {

// Labeled synthetic corpora for end-to-end exercises: families of random
// files sharing planted byte sequences, plus a pure-random benign pool that
// doubles as background-index training data.
//
// Training files carry a random subset of at least plants_per_family - 1 of
// the family's plants, so per-plant frequencies vary the way real family
// features do. Holdout files carry every plant, so any threshold over plant
// features accepts them.
struct SynthParams {
    std::uint32_t families = 4;
    std::uint32_t files_per_family = 20;
    std::uint32_t plants_per_family = 6;
    std::uint32_t plant_len = 64;
    std::uint32_t benign_files = 10000;
    std::uint32_t min_file_size = 4096;
    std::uint32_t max_file_size = 16384;
    std::uint64_t seed = 1;
};

struct SynthBench {
    std::filesystem::path root;
    std::vector<CorpusManifest> train;    // one per family
    std::vector<CorpusManifest> holdout;  // one per family
    CorpusManifest benign;
};

// Writes <out_dir>/{train,holdout}/family_<i>/ and <out_dir>/benign/, plus a
// .manifest.tsv next to each corpus directory. Fully deterministic in seed.
SynthBench generate_synth_bench(const std::filesystem::path& out_dir,
                                const SynthParams& params = {});

}  // namespace sigforge
