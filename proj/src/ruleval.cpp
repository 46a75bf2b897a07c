#include "sigforge/ruleval.hpp"

#include <atomic>
#include <cstdio>

#include "sigforge/matcher.hpp"
#include "sigforge/util.hpp"

namespace sigforge {
namespace {

std::uint64_t count_matches(const RuleMatcher& matcher, const CorpusManifest& corpus) {
    std::atomic<std::uint64_t> matches{0};
    parallel_for(corpus.samples.size(), [&](std::size_t i) {
        const std::vector<std::uint8_t> bytes = load_bytes(corpus.samples[i]);
        if (matcher.match(bytes).matched) matches.fetch_add(1, std::memory_order_relaxed);
    });
    return matches.load();
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

double f_beta_score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, double beta) {
    const double b2 = beta * beta;
    const double numerator = (1.0 + b2) * static_cast<double>(tp);
    const double denominator =
        numerator + b2 * static_cast<double>(fn) + static_cast<double>(fp);
    return denominator > 0.0 ? numerator / denominator : 0.0;
}

EvalReport evaluate(const YaraRule& rule, const CorpusManifest& positives,
                    const CorpusManifest& negatives, double beta) {
    if (positives.samples.empty()) throw ArgumentError("positives corpus is empty");

    const RuleMatcher matcher(rule);
    EvalReport report;
    report.beta = beta;
    report.tp = count_matches(matcher, positives);
    report.fn = positives.samples.size() - report.tp;
    report.fp = count_matches(matcher, negatives);
    report.tn = negatives.samples.size() - report.fp;

    report.tpr = static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fn);
    report.fpr = report.fp + report.tn > 0
                     ? static_cast<double>(report.fp) / static_cast<double>(report.fp + report.tn)
                     : 0.0;
    report.f_beta = f_beta_score(report.tp, report.fp, report.fn, beta);
    report.usable = report.fpr <= 0.001;
    return report;
}

std::string eval_csv_header() { return "name,tp,fp,fn,tn,tpr,fpr,f_beta,usable"; }

std::string eval_csv_line(const std::string& name, const EvalReport& r) {
    return name + "," + std::to_string(r.tp) + "," + std::to_string(r.fp) + "," +
           std::to_string(r.fn) + "," + std::to_string(r.tn) + "," + fmt_double(r.tpr) + "," +
           fmt_double(r.fpr) + "," + fmt_double(r.f_beta) + "," + (r.usable ? "true" : "false");
}

}  // namespace sigforge
