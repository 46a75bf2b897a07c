#include "sigforge/rulegen.hpp"

#include <algorithm>
#include <unordered_map>

#include "sigforge/feature_filter.hpp"
#include "sigforge/ngram.hpp"

namespace sigforge {
namespace {

// Minimizing s*VarLow + (m-s)*VarHigh over the ascending sort equals
// maximizing g(s) = sumLow^2/s + sumHigh^2/(m-s); the second form compares
// exactly with integer cross multiplication.
struct SplitGoal {
    unsigned __int128 num = 0;  // g's numerator over denominator den
    unsigned __int128 den = 1;

    bool better_than(const SplitGoal& other) const {
        return num * other.den > other.num * den;
    }
};

SplitGoal split_goal(std::uint64_t sum_low, std::uint64_t sum_high, std::uint64_t s,
                     std::uint64_t m) {
    const unsigned __int128 a2 = static_cast<unsigned __int128>(sum_low) * sum_low;
    const unsigned __int128 b2 = static_cast<unsigned __int128>(sum_high) * sum_high;
    SplitGoal g;
    if (s == 0) {
        g.num = b2;
        g.den = m;
    } else {
        g.num = a2 * (m - s) + b2 * s;
        g.den = static_cast<unsigned __int128>(s) * (m - s);
    }
    return g;
}

}  // namespace

int clause_threshold(std::vector<std::uint32_t> counts, ThresholdMode mode) {
    const std::size_t m = counts.size();
    if (m < 2) throw ArgumentError("threshold split needs at least 2 counts");
    for (std::uint32_t c : counts)
        if (c < 1) throw ArgumentError("feature counts must be at least 1");
    std::sort(counts.begin(), counts.end());

    std::uint64_t total = 0;
    for (std::uint32_t c : counts) total += c;

    std::size_t best_s = 0;
    SplitGoal best = split_goal(0, total, 0, m);
    std::uint64_t sum_low = 0;
    for (std::size_t s = 1; s < m; ++s) {
        sum_low += counts[s - 1];
        const SplitGoal g = split_goal(sum_low, total - sum_low, s, m);
        if (g.better_than(best)) {
            best = g;
            best_s = s;
        }
    }

    const auto mi = static_cast<int>(m);
    const auto s_star = static_cast<int>(best_s);
    if (mode == ThresholdMode::SplitIndex) return std::clamp(s_star, 1, mi);
    return std::clamp(mi - s_star, 1, mi);
}

std::pair<YaraRule, CandidateScore> assemble_candidate(
    const std::vector<Bicluster>& biclusters, std::size_t sample_count,
    const std::vector<FeatureOccurrence>& features, const std::string& name,
    ThresholdMode mode) {
    if (biclusters.empty()) throw ArgumentError("candidate assembly needs >= 1 bicluster");

    YaraRule rule;
    rule.name = sanitize_identifier(name);

    std::unordered_map<std::size_t, int> pattern_of;  // feature index -> pattern id
    for (const auto& b : biclusters) {
        RuleClause clause;
        std::vector<std::uint32_t> counts;
        counts.reserve(b.col_ids.size());
        for (std::size_t col : b.col_ids) {
            if (col >= features.size())
                throw ArgumentError("bicluster references unknown feature " +
                                    std::to_string(col));
            auto [it, fresh] = pattern_of.try_emplace(col, static_cast<int>(rule.patterns.size()));
            if (fresh) rule.patterns.push_back(features[col].gram.bytes);
            clause.feature_ids.push_back(it->second);
            counts.push_back(static_cast<std::uint32_t>(features[col].file_set.count()));
        }
        clause.threshold_t = clause_threshold(counts, mode);
        rule.clauses.push_back(std::move(clause));
    }

    // Coverage under matcher semantics: a sample is covered if some clause
    // reaches its threshold with the patterns that sample actually contains.
    std::size_t covered = 0;
    for (std::size_t s = 0; s < sample_count; ++s) {
        bool hit = false;
        for (std::size_t c = 0; c < biclusters.size() && !hit; ++c) {
            int present = 0;
            for (std::size_t col : biclusters[c].col_ids)
                present += features[col].file_set.test(s) ? 1 : 0;
            hit = present >= rule.clauses[c].threshold_t;
        }
        if (hit) ++covered;
    }

    CandidateScore score;
    score.coverage = sample_count ? static_cast<double>(covered) / sample_count : 0.0;
    score.distinct_features = static_cast<int>(rule.patterns.size());
    score.score = score.coverage * std::min(5, score.distinct_features) / 5.0;
    rule.provenance.coverage = score.coverage;
    rule.provenance.score = score.score;
    return {std::move(rule), score};
}

GenerationResult build_yara_rule(const LoadedCorpus& samples, const BloomIndex& index,
                                 const RuleBuildParams& params) {
    const std::size_t sample_count = samples.manifest.samples.size();
    if (sample_count < 2) throw ArgumentError("need >= 2 samples to build a rule");

    GenerationResult result;
    std::string reason = "no gram size produced any candidate features";

    std::optional<CandidateScore> best_score;
    for (std::uint32_t n : kGramSizes) {
        if (n > params.max_n) break;
        const auto filter_it = index.filters.find(n);
        if (filter_it == index.filters.end()) {
            reason = "background index has no filter for n=" + std::to_string(n);
            continue;
        }

        TopKParams top_params;
        top_params.k = params.k_per_n;
        const TopKResult top = top_k(samples, n, top_params);
        if (top.grams.empty()) {
            reason = "no grams of size " + std::to_string(n) + " (samples too small)";
            continue;
        }

        std::vector<FileSet> occ = occurrences(samples, top.grams);
        std::vector<FeatureOccurrence> candidates;
        candidates.reserve(top.grams.size());
        for (std::size_t i = 0; i < top.grams.size(); ++i) {
            if (!occ[i].any()) continue;
            candidates.push_back({top.grams[i], std::move(occ[i])});
        }

        const std::vector<FeatureOccurrence> kept =
            filter_simple(candidates, filter_it->second);
        if (kept.size() < 2) {
            reason = "features at n=" + std::to_string(n) +
                     " were filtered as padding, low-entropy, or background-common";
            continue;
        }

        for (const Normalization norm : {Normalization::Scale, Normalization::Bistochastic}) {
            const bool is_scale = norm == Normalization::Scale;
            SplitMix64 mixer(params.seed ^ (0x5BC1ULL * n) ^ (is_scale ? 0ULL : 1ULL));
            const std::uint64_t sub_seed = mixer.next();

            std::vector<Bicluster> clusters;
            try {
                clusters = bicluster(samples.manifest, kept, norm, sub_seed);
            } catch (const InsufficientSignal& e) {
                reason = e.what();
                continue;
            }
            if (clusters.empty()) {
                reason = "no biclusters survived filtering at n=" + std::to_string(n);
                continue;
            }

            auto [rule, score] = assemble_candidate(clusters, sample_count, kept, params.name,
                                                    params.threshold_mode);
            rule.provenance.n = n;
            rule.provenance.normalization = is_scale ? "scale" : "bistochastic";

            // Strict improvement keeps the earliest candidate on ties, which
            // is exactly the (smaller n, scale first) preference.
            if (!best_score || score.score > best_score->score) {
                best_score = score;
                result.rule = std::move(rule);
                result.score = score;
            }
            if (score.coverage == 1.0 && score.distinct_features >= 5) return result;
        }
    }

    if (!result.rule) result.no_rule_reason = reason;
    return result;
}

GenerationResult build_yara_rule(const CorpusManifest& samples, const BloomIndex& index,
                                 const RuleBuildParams& params) {
    return build_yara_rule(load_corpus(samples), index, params);
}

}  // namespace sigforge
