#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sigforge/bloom.hpp"
#include "sigforge/corpus.hpp"
#include "sigforge/matcher.hpp"
#include "sigforge/rulegen.hpp"
#include "sigforge/ruleval.hpp"
#include "sigforge/synth.hpp"
#include "sigforge/yara_rule.hpp"

namespace {

// Exit codes: 0 success, 1 usage/argument, 2 I/O, 3 no rule produced,
// 4 format error.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNoRule = 3;
constexpr int kExitFormat = 4;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sigforge::IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw sigforge::IoError("cannot read " + path.string());
    return text;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw sigforge::IoError("cannot write " + path.string());
}

struct BuildIndexArgs {
    std::string train_dir;
    std::string out_path;
    sigforge::BuildIndexParams params;
    std::string mode = "auto";
};

int cmd_build_index(BuildIndexArgs args) {
    if (args.mode == "exact")
        args.params.mode = sigforge::TopKMode::Exact;
    else if (args.mode == "hashgram")
        args.params.mode = sigforge::TopKMode::HashGram;

    const sigforge::CorpusManifest manifest = sigforge::scan_corpus(args.train_dir);
    const sigforge::BloomIndex index = sigforge::build_index(manifest, args.params);
    sigforge::save_index(index, args.out_path);
    std::cout << "indexed " << manifest.samples.size() << " files into " << args.out_path
              << " (" << index.filters.size() << " filters)\n";
    return kExitOk;
}

struct GenerateArgs {
    std::string samples_dir;
    std::string index_path;
    std::string out_path;
    sigforge::RuleBuildParams params;
    std::string threshold_mode = "high-group";
};

int cmd_generate(GenerateArgs args) {
    args.params.threshold_mode = args.threshold_mode == "split-index"
                                     ? sigforge::ThresholdMode::SplitIndex
                                     : sigforge::ThresholdMode::HighGroup;

    const sigforge::CorpusManifest manifest = sigforge::scan_corpus(args.samples_dir);
    const sigforge::BloomIndex index = sigforge::load_index(args.index_path);
    const sigforge::GenerationResult result =
        sigforge::build_yara_rule(manifest, index, args.params);
    if (!result.rule) {
        std::cerr << "no rule: " << result.no_rule_reason << "\n";
        return kExitNoRule;
    }

    write_text_file(args.out_path, sigforge::emit_yara(*result.rule));
    const auto& p = result.rule->provenance;
    std::printf("rule %s: n=%u normalization=%s coverage=%.9g score=%.9g\n",
                sigforge::sanitize_identifier(args.params.name).c_str(), p.n,
                p.normalization.c_str(), p.coverage, p.score);
    return kExitOk;
}

int cmd_scan(const std::string& rule_path, const std::string& target_dir) {
    const sigforge::YaraRule rule = sigforge::parse_rule(read_text_file(rule_path));
    const sigforge::RuleMatcher matcher(rule);

    if (!std::filesystem::is_directory(target_dir))
        throw sigforge::IoError("not a directory: " + target_dir);
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(target_dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.native() < b.native(); });

    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw sigforge::IoError("cannot open " + path.string());
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        if (matcher.match(bytes).matched)
            std::cout << path.string() << "\t" << rule.name << "\n";
    }
    return kExitOk;
}

int cmd_eval(const std::string& rule_path, const std::string& positives_dir,
             const std::string& negatives_dir, double beta) {
    const sigforge::YaraRule rule = sigforge::parse_rule(read_text_file(rule_path));
    const sigforge::CorpusManifest positives = sigforge::scan_corpus(positives_dir);
    const sigforge::CorpusManifest negatives = sigforge::scan_corpus(negatives_dir);
    const sigforge::EvalReport report = sigforge::evaluate(rule, positives, negatives, beta);
    std::cout << sigforge::eval_csv_header() << "\n"
              << sigforge::eval_csv_line(rule.name, report) << "\n";
    return kExitOk;
}

int cmd_synth_bench(const std::string& out_dir, const sigforge::SynthParams& params) {
    const sigforge::SynthBench bench = sigforge::generate_synth_bench(out_dir, params);
    std::cout << "wrote " << bench.train.size() << " families ("
              << (bench.train.empty() ? 0 : bench.train.front().samples.size())
              << " train files each) and " << bench.benign.samples.size()
              << " benign files under " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"n-gram biclustering rule generator"};
    app.require_subcommand(1);

    BuildIndexArgs bi;
    auto* build = app.add_subcommand("build-index", "build a background frequency index");
    build->add_option("--train", bi.train_dir, "training corpus directory")->required();
    build->add_option("--out", bi.out_path, "output index file")->required();
    build->add_option("--k", bi.params.k, "top-k grams per size");
    build->add_option("--min-doc-frac", bi.params.min_doc_frac,
                      "document-frequency floor for inclusion");
    build->add_option("--seed", bi.params.seed, "hash seed");
    build->add_option("--max-n", bi.params.max_n, "largest gram size to index");
    build->add_option("--mode", bi.mode, "extraction mode")
        ->check(CLI::IsMember({"auto", "exact", "hashgram"}));

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "build a rule from a sample family");
    generate->add_option("--samples", gen.samples_dir, "family sample directory")->required();
    generate->add_option("--index", gen.index_path, "background index file")->required();
    generate->add_option("--out", gen.out_path, "output rule file")->required();
    generate->add_option("--name", gen.params.name, "rule name");
    generate->add_option("--seed", gen.params.seed, "clustering seed");
    generate->add_option("--threshold-mode", gen.threshold_mode, "clause threshold reading")
        ->check(CLI::IsMember({"high-group", "split-index"}));
    generate->add_option("--k-per-n", gen.params.k_per_n, "candidate grams per size");
    generate->add_option("--max-n", gen.params.max_n, "largest gram size to try");

    std::string scan_rule, scan_dir;
    auto* scan = app.add_subcommand("scan", "match a rule against a directory");
    scan->add_option("--rule", scan_rule, "rule file")->required();
    scan->add_option("--dir", scan_dir, "directory to scan")->required();

    std::string eval_rule, eval_pos, eval_neg;
    double eval_beta = 0.001;
    auto* eval = app.add_subcommand("eval", "evaluate a rule over labeled corpora");
    eval->add_option("--rule", eval_rule, "rule file")->required();
    eval->add_option("--positives", eval_pos, "positive corpus directory")->required();
    eval->add_option("--negatives", eval_neg, "negative corpus directory")->required();
    eval->add_option("--beta", eval_beta, "F-beta weighting");

    std::string synth_out;
    sigforge::SynthParams sp;
    auto* synth = app.add_subcommand("synth-bench", "generate synthetic labeled corpora");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--families", sp.families, "number of families");
    synth->add_option("--files-per-family", sp.files_per_family, "train/holdout files per family");
    synth->add_option("--plants", sp.plants_per_family, "planted sequences per family");
    synth->add_option("--plant-len", sp.plant_len, "planted sequence length");
    synth->add_option("--benign", sp.benign_files, "benign pool size");
    synth->add_option("--min-file-size", sp.min_file_size, "smallest generated file");
    synth->add_option("--max-file-size", sp.max_file_size, "largest generated file");
    synth->add_option("--seed", sp.seed, "generation seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (build->parsed()) return cmd_build_index(bi);
        if (generate->parsed()) return cmd_generate(gen);
        if (scan->parsed()) return cmd_scan(scan_rule, scan_dir);
        if (eval->parsed()) return cmd_eval(eval_rule, eval_pos, eval_neg, eval_beta);
        if (synth->parsed()) return cmd_synth_bench(synth_out, sp);
    } catch (const sigforge::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const sigforge::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const sigforge::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
