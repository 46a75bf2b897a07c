#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigforge/bicluster.hpp"
#include "sigforge/bloom.hpp"
#include "sigforge/corpus.hpp"
#include "sigforge/yara_rule.hpp"

namespace sigforge {

// How the variance split over sorted per-feature counts maps to a clause
// threshold. HighGroup takes the size of the high-frequency side (the
// default: demanding the common features keeps false positives low);
// SplitIndex takes the split position itself, the other reading.
enum class ThresholdMode { HighGroup, SplitIndex };

struct CandidateScore {
    double coverage = 0.0;
    int distinct_features = 0;
    double score = 0.0;
};

struct RuleBuildParams {
    std::string name = "autorule";
    std::uint64_t seed = 0;
    ThresholdMode threshold_mode = ThresholdMode::HighGroup;
    std::uint32_t k_per_n = 1024;
    std::uint32_t max_n = 1024;
};

struct GenerationResult {
    std::optional<YaraRule> rule;
    CandidateScore score;
    std::string no_rule_reason;  // set when rule is absent
};

// Two-group variance split over the counts, sorted ascending: the returned
// threshold is the clause's required number of present patterns. Ties in the
// objective go to the smallest split; comparisons are exact (integer cross
// multiplication), so the result never depends on rounding.
int clause_threshold(std::vector<std::uint32_t> counts,
                     ThresholdMode mode = ThresholdMode::HighGroup);

// Turns biclusters into one rule: clause per bicluster with a variance-split
// threshold over its features' in-corpus frequencies. Coverage is computed
// with matcher semantics (a sample counts when some clause is satisfied by
// the features it actually contains), so the recorded number is exactly what
// evaluating the emitted rule on the generating samples reproduces.
std::pair<YaraRule, CandidateScore> assemble_candidate(
    const std::vector<Bicluster>& biclusters, std::size_t sample_count,
    const std::vector<FeatureOccurrence>& features, const std::string& name,
    ThresholdMode mode);

// Sweeps the gram-size ladder and both normalizations, keeping the best
// scoring candidate (ties: smaller n, then scale before bistochastic).
// Stops early on a full-coverage candidate with at least 5 distinct
// patterns, which no later candidate can beat.
GenerationResult build_yara_rule(const LoadedCorpus& samples, const BloomIndex& index,
                                 const RuleBuildParams& params = {});
GenerationResult build_yara_rule(const CorpusManifest& samples, const BloomIndex& index,
                                 const RuleBuildParams& params = {});

}  // namespace sigforge
