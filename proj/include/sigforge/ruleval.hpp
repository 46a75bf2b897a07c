#pragma once

#include <cstdint>
#include <string>

#include "sigforge/corpus.hpp"
#include "sigforge/yara_rule.hpp"

namespace sigforge {

// Confusion counts and derived rates for one rule over labeled corpora.
// f_beta weighs false positives 1/beta^2 times as heavily as false
// negatives; with the default beta, one false positive costs as much as a
// million misses. usable reflects the 0.1% false-positive bar.
struct EvalReport {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    double tpr = 0.0, fpr = 0.0;
    double f_beta = 0.0;
    double beta = 0.001;
    bool usable = false;
};

double f_beta_score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, double beta);

// Matches the rule against every file in both corpora.
EvalReport evaluate(const YaraRule& rule, const CorpusManifest& positives,
                    const CorpusManifest& negatives, double beta = 0.001);

// One-line report serialization, comma separated.
std::string eval_csv_header();
std::string eval_csv_line(const std::string& name, const EvalReport& report);

}  // namespace sigforge
