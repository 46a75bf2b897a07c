#include "sigforge/synth.hpp"

#include <algorithm>
#include <fstream>
#include <span>

#include "sigforge/util.hpp"

namespace sigforge {
namespace {

std::vector<std::uint8_t> random_bytes(SplitMix64& rng, std::size_t len) {
    std::vector<std::uint8_t> out(len);
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
        const std::uint64_t v = rng.next();
        for (int b = 0; b < 8; ++b) out[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
    }
    for (; i < len; ++i) out[i] = rng.next_byte();
    return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

// First k entries of a seeded shuffle of [0, n), ascending.
std::vector<std::uint32_t> choose(SplitMix64& rng, std::uint32_t n, std::uint32_t k) {
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
    for (std::uint32_t i = 0; i < k; ++i)
        std::swap(all[i], all[i + rng.below(n - i)]);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

// Random content with the chosen plants at random non-overlapping offsets,
// one per equal segment of the file.
std::vector<std::uint8_t> family_file(SplitMix64& rng,
                                      const std::vector<std::vector<std::uint8_t>>& plants,
                                      const std::vector<std::uint32_t>& chosen,
                                      std::size_t file_len) {
    auto bytes = random_bytes(rng, file_len);
    const std::size_t seg = file_len / chosen.size();
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        const auto& plant = plants[chosen[i]];
        const std::size_t offset = i * seg + rng.below(seg - plant.size() + 1);
        std::copy(plant.begin(), plant.end(), bytes.begin() + offset);
    }
    return bytes;
}

std::string numbered(const char* prefix, std::uint32_t i, int width) {
    std::string num = std::to_string(i);
    return prefix + std::string(width - std::min<int>(width, num.size()), '0') + num + ".bin";
}

CorpusManifest manifest_for(const std::filesystem::path& dir) {
    CorpusManifest manifest = scan_corpus(dir);
    write_manifest(manifest, dir.parent_path() / (dir.filename().string() + ".manifest.tsv"));
    return manifest;
}

}  // namespace

SynthBench generate_synth_bench(const std::filesystem::path& out_dir,
                                const SynthParams& params) {
    if (params.plant_len < 8)
        throw ArgumentError("plant_len must be at least 8, the smallest gram size");
    if (params.families < 1 || params.files_per_family < 1 || params.plants_per_family < 1)
        throw ArgumentError("families, files per family, and plants must be positive");
    if (params.min_file_size > params.max_file_size)
        throw ArgumentError("min_file_size exceeds max_file_size");
    if (params.min_file_size / params.plants_per_family < params.plant_len)
        throw ArgumentError("files too small to hold all plants without overlap");

    SplitMix64 rng(params.seed);
    SynthBench bench;
    bench.root = out_dir;

    const auto size_span =
        static_cast<std::uint64_t>(params.max_file_size - params.min_file_size) + 1;
    auto random_size = [&rng, &params, size_span] {
        return params.min_file_size + static_cast<std::size_t>(rng.below(size_span));
    };

    for (std::uint32_t fam = 0; fam < params.families; ++fam) {
        std::vector<std::vector<std::uint8_t>> plants;
        plants.reserve(params.plants_per_family);
        for (std::uint32_t p = 0; p < params.plants_per_family; ++p)
            plants.push_back(random_bytes(rng, params.plant_len));

        const std::string fam_name = "family_" + std::to_string(fam);
        const auto train_dir = out_dir / "train" / fam_name;
        const auto holdout_dir = out_dir / "holdout" / fam_name;
        std::filesystem::create_directories(train_dir);
        std::filesystem::create_directories(holdout_dir);

        // Training files: all but at most one plant, so frequencies vary.
        const std::uint32_t keep_min =
            params.plants_per_family > 1 ? params.plants_per_family - 1 : 1;
        std::vector<std::uint32_t> all_plants(params.plants_per_family);
        for (std::uint32_t p = 0; p < params.plants_per_family; ++p) all_plants[p] = p;

        for (std::uint32_t f = 0; f < params.files_per_family; ++f) {
            const auto keep =
                keep_min + static_cast<std::uint32_t>(
                               rng.below(params.plants_per_family - keep_min + 1));
            const auto chosen = choose(rng, params.plants_per_family, keep);
            write_file(train_dir / numbered("s", f, 4),
                       family_file(rng, plants, chosen, random_size()));
        }
        for (std::uint32_t f = 0; f < params.files_per_family; ++f) {
            write_file(holdout_dir / numbered("h", f, 4),
                       family_file(rng, plants, all_plants, random_size()));
        }
        bench.train.push_back(manifest_for(train_dir));
        bench.holdout.push_back(manifest_for(holdout_dir));
    }

    if (params.benign_files > 0) {
        const auto benign_dir = out_dir / "benign";
        std::filesystem::create_directories(benign_dir);
        for (std::uint32_t f = 0; f < params.benign_files; ++f)
            write_file(benign_dir / numbered("b", f, 5), random_bytes(rng, random_size()));
        bench.benign = manifest_for(benign_dir);
    }
    return bench;
}

}  // namespace sigforge
