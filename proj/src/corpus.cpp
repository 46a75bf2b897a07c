#include "sigforge/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace sigforge {
namespace fs = std::filesystem;

namespace {

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string digest_stream(std::ifstream& in, const fs::path& path) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw IoError("sha256: cannot allocate digest context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::streamsize got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
    }
    if (in.bad()) {
        EVP_MD_CTX_free(ctx);
        throw IoError("read failed: " + path.string());
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    EVP_DigestFinal_ex(ctx, md, &md_len);
    EVP_MD_CTX_free(ctx);
    return to_hex(std::span<const std::uint8_t>(md, md_len));
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    EVP_Digest(data.data(), data.size(), md, &md_len, EVP_sha256(), nullptr);
    return to_hex(std::span<const std::uint8_t>(md, md_len));
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    return digest_stream(in, path);
}

CorpusManifest scan_corpus(const fs::path& root, bool recursive, bool dedup) {
    std::error_code ec;
    if (!fs::exists(root, ec) || ec) throw IoError("corpus root does not exist: " + root.string());
    if (!fs::is_directory(root, ec) || ec)
        throw IoError("corpus root is not a directory: " + root.string());

    std::vector<fs::path> paths;
    auto consider = [&](const fs::directory_entry& entry) {
        std::error_code file_ec;
        if (entry.is_regular_file(file_ec) && !file_ec) paths.push_back(entry.path());
    };
    if (recursive) {
        for (const auto& entry : fs::recursive_directory_iterator(root)) consider(entry);
    } else {
        for (const auto& entry : fs::directory_iterator(root)) consider(entry);
    }
    if (paths.empty()) throw IoError("no regular files under corpus root: " + root.string());

    std::sort(paths.begin(), paths.end(),
              [](const fs::path& a, const fs::path& b) { return a.native() < b.native(); });

    std::vector<SampleRef> samples(paths.size());
    parallel_for(paths.size(), [&](std::size_t i) {
        samples[i].path = paths[i];
        samples[i].size = fs::file_size(paths[i]);
        samples[i].content_digest = sha256_file(paths[i]);
    });

    CorpusManifest manifest;
    manifest.root = root;
    manifest.label = root.filename().empty() ? root.parent_path().filename().string()
                                             : root.filename().string();
    manifest.created_at = now_iso8601();

    std::unordered_map<std::string, std::uint32_t> first_seen;
    std::uint32_t next_id = 0;
    for (auto& s : samples) {
        auto [it, fresh] = first_seen.try_emplace(s.content_digest, next_id);
        if (!fresh) {
            if (dedup) continue;
            s.duplicate_of = it->second;
        }
        s.id = next_id++;
        manifest.samples.push_back(std::move(s));
    }
    return manifest;
}

std::vector<std::uint8_t> load_bytes(const SampleRef& sample, bool verify_digest) {
    std::ifstream in(sample.path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + sample.path.string());
    std::vector<std::uint8_t> data;
    data.reserve(sample.size);
    data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + sample.path.string());
    if (verify_digest) {
        const std::string digest = sha256_hex(data);
        if (digest != sample.content_digest)
            throw IoError("digest mismatch for " + sample.path.string() + ": manifest " +
                          sample.content_digest + ", on disk " + digest);
    }
    return data;
}

void write_manifest(const CorpusManifest& manifest, const fs::path& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open manifest for writing: " + out_path.string());
    for (const auto& s : manifest.samples)
        out << s.id << '\t' << s.content_digest << '\t' << s.size << '\t' << s.path.string()
            << '\n';
    if (!out) throw IoError("manifest write failed: " + out_path.string());
}

CorpusManifest read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    CorpusManifest manifest;
    manifest.root = path.parent_path();
    manifest.label = path.stem().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string id_text, digest, size_text, sample_path;
        if (!std::getline(fields, id_text, '\t') || !std::getline(fields, digest, '\t') ||
            !std::getline(fields, size_text, '\t') || !std::getline(fields, sample_path))
            throw FormatError("malformed manifest record at line " + std::to_string(line_no) +
                              " in " + path.string());
        SampleRef s;
        try {
            s.id = static_cast<std::uint32_t>(std::stoul(id_text));
            s.size = std::stoull(size_text);
        } catch (const std::exception&) {
            throw FormatError("non-numeric manifest field at line " + std::to_string(line_no) +
                              " in " + path.string());
        }
        if (s.id != manifest.samples.size())
            throw FormatError("manifest ids not dense at line " + std::to_string(line_no) +
                              " in " + path.string());
        s.content_digest = digest;
        s.path = sample_path;
        manifest.samples.push_back(std::move(s));
    }
    return manifest;
}

LoadedCorpus load_corpus(CorpusManifest manifest) {
    LoadedCorpus corpus;
    corpus.data.resize(manifest.samples.size());
    parallel_for(manifest.samples.size(), [&](std::size_t i) {
        corpus.data[i] = load_bytes(manifest.samples[i]);
    });
    corpus.manifest = std::move(manifest);
    return corpus;
}

}  // namespace sigforge
