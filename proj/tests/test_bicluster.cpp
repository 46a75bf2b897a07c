#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "sigforge/bicluster.hpp"
#include "sigforge/util.hpp"

using namespace sigforge;

namespace {

CorpusManifest make_manifest(std::size_t n) {
    CorpusManifest m;
    m.root = "mem";
    m.label = "mem";
    for (std::size_t i = 0; i < n; ++i) {
        SampleRef s;
        s.id = static_cast<std::uint32_t>(i);
        s.path = "s" + std::to_string(i);
        s.size = 1;
        m.samples.push_back(std::move(s));
    }
    return m;
}

FeatureOccurrence make_feature(std::size_t n_samples, const std::vector<std::uint32_t>& members,
                               std::uint8_t tag = 0) {
    FeatureOccurrence f;
    f.gram.n = 8;
    f.gram.bytes.assign(8, tag);
    f.gram.doc_freq = static_cast<std::uint32_t>(members.size());
    f.gram.entropy = 3.0;
    f.file_set = FileSet(n_samples);
    for (std::uint32_t i : members) f.file_set.set(i);
    return f;
}

// Hand-built mixture with the given per-component member lists over r+c
// points. Members get responsibility `hi`, everyone else splits the rest.
MixtureResult make_mixture(int n_points, const std::vector<std::vector<int>>& comps,
                           double hi = 0.9) {
    const int k = static_cast<int>(comps.size());
    MixtureResult mix;
    mix.k_effective = k;
    mix.bound = 0.0;
    mix.iterations = 1;
    mix.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    mix.means = Eigen::MatrixXd::Zero(k, 1);
    mix.variances = Eigen::MatrixXd::Ones(k, 1);
    mix.responsibilities = Eigen::MatrixXd::Constant(n_points, k, k > 1 ? (1.0 - hi) / (k - 1) : 1.0);
    for (int c = 0; c < k; ++c) {
        for (int p : comps[c]) {
            for (int other = 0; other < k; ++other)
                mix.responsibilities(p, other) = other == c ? hi : (1.0 - hi) / (k - 1);
        }
    }
    return mix;
}

std::vector<int> iota_vec(int lo, int hi) {
    std::vector<int> v;
    for (int i = lo; i < hi; ++i) v.push_back(i);
    return v;
}

}  // namespace

TEST_SUITE("bicluster") {

TEST_CASE("matrix construction prunes dead rows and columns") {
    // Sample 3 holds no live feature; feature 2 holds no sample at all.
    const auto manifest = make_manifest(4);
    std::vector<FeatureOccurrence> features{
        make_feature(4, {0, 1}),
        make_feature(4, {1, 2}),
        make_feature(4, {}),
    };
    const OccurrenceMatrix m = build_matrix(manifest, features);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 2);
    CHECK(m.row_ids == std::vector<std::uint32_t>{0, 1, 2});
    CHECK(m.col_ids == std::vector<std::size_t>{0, 1});
    CHECK(m.dropped_samples == std::vector<std::uint32_t>{3});
    CHECK(m.dropped_features == std::vector<std::size_t>{2});

    CHECK(m.cells(0, 0) == 1.0);
    CHECK(m.cells(0, 1) == 0.0);
    CHECK(m.cells(1, 0) == 1.0);
    CHECK(m.cells(1, 1) == 1.0);
    CHECK(m.cells(2, 0) == 0.0);
    CHECK(m.cells(2, 1) == 1.0);
    CHECK(m.row_sums(0) == 1.0);
    CHECK(m.row_sums(1) == 2.0);
    CHECK(m.col_sums(0) == 2.0);
    CHECK(m.col_sums(1) == 2.0);
}

TEST_CASE("matrix construction full occupancy") {
    const auto manifest = make_manifest(3);
    std::vector<FeatureOccurrence> features{
        make_feature(3, {0, 1, 2}),
        make_feature(3, {0, 1, 2}),
    };
    const OccurrenceMatrix m = build_matrix(manifest, features);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 2);
    CHECK(m.cells.sum() == 6.0);
    CHECK(m.dropped_samples.empty());
    CHECK(m.dropped_features.empty());
}

TEST_CASE("matrix construction rejects degenerate input") {
    const auto manifest = make_manifest(3);

    std::vector<FeatureOccurrence> one_col{make_feature(3, {0, 1, 2})};
    CHECK_THROWS_WITH_AS(build_matrix(manifest, one_col),
                         doctest::Contains("need at least 2x2"), InsufficientSignal);

    std::vector<FeatureOccurrence> one_row{make_feature(3, {1}), make_feature(3, {1})};
    CHECK_THROWS_AS(build_matrix(manifest, one_row), InsufficientSignal);

    std::vector<FeatureOccurrence> wrong_size{make_feature(2, {0, 1}),
                                              make_feature(3, {0, 1, 2})};
    CHECK_THROWS_AS(build_matrix(manifest, wrong_size), ArgumentError);
}

TEST_CASE("scale normalization matches the element formula") {
    const auto manifest = make_manifest(2);
    std::vector<FeatureOccurrence> all_ones{make_feature(2, {0, 1}), make_feature(2, {0, 1})};
    const OccurrenceMatrix m = build_matrix(manifest, all_ones);
    const Eigen::MatrixXd a = normalize_scale(m);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(a(i, j) == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<FeatureOccurrence> diag{make_feature(2, {0}), make_feature(2, {1})};
    const OccurrenceMatrix mi = build_matrix(manifest, diag);
    const Eigen::MatrixXd ai = normalize_scale(mi);
    CHECK(ai(0, 0) == 1.0);
    CHECK(ai(0, 1) == 0.0);
    CHECK(ai(1, 0) == 0.0);
    CHECK(ai(1, 1) == 1.0);
}

TEST_CASE("scale normalization random matrix oracle") {
    SplitMix64 rng(404);
    const std::size_t r = 6, c = 8;
    const auto manifest = make_manifest(r);
    std::vector<FeatureOccurrence> features;
    // Rejection-sample until every row and column is occupied so nothing
    // gets pruned and indices line up with the raw matrix.
    for (;;) {
        features.clear();
        Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(r, c);
        for (std::size_t j = 0; j < c; ++j) {
            std::vector<std::uint32_t> members;
            for (std::uint32_t i = 0; i < r; ++i)
                if (rng.next_unit() < 0.4) members.push_back(i);
            for (std::uint32_t i : members) raw(i, j) = 1.0;
            features.push_back(make_feature(r, members));
        }
        if (raw.rowwise().sum().minCoeff() > 0 && raw.colwise().sum().minCoeff() > 0) break;
    }
    const OccurrenceMatrix m = build_matrix(manifest, features);
    REQUIRE(m.rows() == static_cast<int>(r));
    REQUIRE(m.cols() == static_cast<int>(c));
    const Eigen::MatrixXd a = normalize_scale(m);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            const double expect = m.cells(i, j) / std::sqrt(m.row_sums(i) * m.col_sums(j));
            CHECK(a(i, j) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("bistochastic scaling balances both margins") {
    const auto m3 = make_manifest(3);
    std::vector<FeatureOccurrence> ones{make_feature(3, {0, 1, 2}), make_feature(3, {0, 1, 2}),
                                        make_feature(3, {0, 1, 2})};
    const auto full = build_matrix(m3, ones);
    const BistochasticResult br = normalize_bistochastic(full);
    CHECK(br.converged);
    CHECK(br.iterations == 1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(br.matrix(i, j) == doctest::Approx(1.0 / 3.0));

    const auto m2 = make_manifest(2);
    std::vector<FeatureOccurrence> diag{make_feature(2, {0}), make_feature(2, {1})};
    const auto eye = build_matrix(m2, diag);
    const BistochasticResult bi = normalize_bistochastic(eye);
    CHECK(bi.converged);
    CHECK(bi.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(bi.matrix(1, 1) == doctest::Approx(1.0));
    CHECK(bi.matrix(0, 1) == 0.0);
    CHECK(bi.matrix(1, 0) == 0.0);
}

TEST_CASE("bistochastic scaling on an uneven feasible support") {
    // Column j covers every row except j mod 5. Dense enough that the
    // target margins are reachable (a sparse random support need not be,
    // in which case only the non-convergence flag is guaranteed).
    const std::size_t r = 5, c = 7;
    const auto manifest = make_manifest(r);
    std::vector<FeatureOccurrence> features;
    for (std::size_t j = 0; j < c; ++j) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t i = 0; i < r; ++i)
            if (i != j % r) members.push_back(i);
        features.push_back(make_feature(r, members));
    }
    const OccurrenceMatrix m = build_matrix(manifest, features);
    REQUIRE(m.rows() == static_cast<int>(r));
    const BistochasticResult br = normalize_bistochastic(m);
    CHECK(br.converged);
    for (int i = 0; i < m.rows(); ++i)
        CHECK(br.matrix.row(i).sum() == doctest::Approx(1.0).epsilon(1e-6));
    for (int j = 0; j < m.cols(); ++j)
        CHECK(br.matrix.col(j).sum() ==
              doctest::Approx(static_cast<double>(r) / c).epsilon(1e-6));
}

TEST_CASE("embedding dimension follows the size formula") {
    auto square = [](std::size_t n) {
        const auto manifest = make_manifest(n);
        std::vector<FeatureOccurrence> features;
        // Identity plus a full first column keeps every margin positive and
        // the graph connected.
        std::vector<std::uint32_t> all;
        for (std::uint32_t i = 0; i < n; ++i) all.push_back(i);
        features.push_back(make_feature(n, all));
        for (std::uint32_t j = 1; j < n; ++j) features.push_back(make_feature(n, {j}));
        return build_matrix(manifest, features);
    };

    const auto m4 = square(4);
    const SpectralEmbedding e4 = embed(normalize_scale(m4), m4);
    CHECK(e4.d == 1);  // floor(log2(4/2)) = 1
    CHECK(e4.z.rows() == 8);
    CHECK(e4.z.cols() == 1);
    CHECK(e4.row_block == 4);

    const auto m16 = square(16);
    const SpectralEmbedding e16 = embed(normalize_scale(m16), m16);
    CHECK(e16.d == 3);  // floor(log2(8)) = 3

    // min(r,c)=2 drives the formula to 0; clamped up to 1.
    const auto m2 = make_manifest(2);
    std::vector<FeatureOccurrence> f2{make_feature(2, {0, 1}), make_feature(2, {0}),
                                      make_feature(2, {1})};
    const auto mm = build_matrix(m2, f2);
    const SpectralEmbedding e2 = embed(normalize_scale(mm), mm);
    CHECK(e2.d == 1);

    // Degenerate spectra shrink the embedding below the formula: a
    // uniform matrix has rank one, so every non-trivial direction is
    // numerically zero and a single coincident column remains.
    const auto m10 = make_manifest(10);
    std::vector<std::uint32_t> all10;
    for (std::uint32_t i = 0; i < 10; ++i) all10.push_back(i);
    std::vector<FeatureOccurrence> f10;
    for (int j = 0; j < 10; ++j) f10.push_back(make_feature(10, all10));
    const auto mu = build_matrix(m10, f10);
    const SpectralEmbedding eu = embed(normalize_scale(mu), mu);
    CHECK(eu.d == 1);
    CHECK(eu.z.isZero(0.0));
}

TEST_CASE("two blocks separate by sign in the leading embedding column") {
    // Rows 0..5 share features 1..4, rows 6..9 share features 5..7;
    // feature 0 spans everyone so the leading singular pair stays trivial.
    const std::size_t n = 10;
    const auto manifest = make_manifest(n);
    std::vector<FeatureOccurrence> features;
    std::vector<std::uint32_t> all, blk_a, blk_b;
    for (std::uint32_t i = 0; i < n; ++i) all.push_back(i);
    for (std::uint32_t i = 0; i < 6; ++i) blk_a.push_back(i);
    for (std::uint32_t i = 6; i < n; ++i) blk_b.push_back(i);
    features.push_back(make_feature(n, all));
    for (int j = 0; j < 4; ++j) features.push_back(make_feature(n, blk_a));
    for (int j = 0; j < 3; ++j) features.push_back(make_feature(n, blk_b));

    const auto m = build_matrix(manifest, features);
    const SpectralEmbedding e = embed(normalize_scale(m), m);
    REQUIRE(e.row_block == 10);

    const double sign_a = e.z(0, 0) > 0 ? 1.0 : -1.0;
    for (int i = 0; i < 6; ++i) CHECK(e.z(i, 0) * sign_a > 1e-9);
    for (int i = 6; i < 10; ++i) CHECK(e.z(i, 0) * sign_a < -1e-9);
    // Exclusive features co-locate with their blocks.
    for (int j = 1; j <= 4; ++j) CHECK(e.z(10 + j, 0) * sign_a > 1e-9);
    for (int j = 5; j <= 7; ++j) CHECK(e.z(10 + j, 0) * sign_a < -1e-9);
}

TEST_CASE("membership extraction drops single-sided components") {
    // Component 0 grabs only rows, component 1 only columns: both are
    // degenerate, so nothing survives.
    const int r = 10, c = 3;
    const auto mix = make_mixture(r + c, {iota_vec(0, 10), iota_vec(10, 13)});
    CHECK(extract_biclusters(mix, r, c).empty());
}

TEST_CASE("membership extraction applies adaptive size floors") {
    // (10 rows, 8 cols) and (2 rows, 3 cols): floors become 5 and 5, the
    // small component is discarded.
    const int r = 12, c = 11;
    std::vector<int> big = iota_vec(0, 10), small_rows = {10, 11};
    for (int j = 0; j < 8; ++j) big.push_back(r + j);
    std::vector<int> small = small_rows;
    for (int j = 8; j < 11; ++j) small.push_back(r + j);
    const auto mix = make_mixture(r + c, {big, small});
    const auto out = extract_biclusters(mix, r, c);
    REQUIRE(out.size() == 1);
    CHECK(out[0].rows == iota_vec(0, 10));
    CHECK(out[0].cols == iota_vec(0, 8));
}

TEST_CASE("membership extraction floors adapt to small samples") {
    // Largest component has 3 rows and 4 cols, so floors drop to (3,4)
    // and the (3,4) component survives while (2,2) does not.
    const int r = 5, c = 6;
    std::vector<int> main_comp = {0, 1, 2, r + 0, r + 1, r + 2, r + 3};
    std::vector<int> runt = {3, 4, r + 4, r + 5};
    const auto mix = make_mixture(r + c, {main_comp, runt});
    const auto out = extract_biclusters(mix, r, c);
    REQUIRE(out.size() == 1);
    CHECK(out[0].rows == std::vector<int>{0, 1, 2});
    CHECK(out[0].cols == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("membership threshold allows overlap") {
    // Rows 0..4 + cols split evenly between two components at 0.5 each:
    // 0.5 > 1/3, so shared points join both sides.
    const int r = 6, c = 6;
    MixtureResult mix = make_mixture(r + c, {{}, {}});
    mix.responsibilities = Eigen::MatrixXd::Constant(r + c, 2, 0.5);
    const auto out = extract_biclusters(mix, r, c);
    REQUIRE(out.size() == 2);
    CHECK(out[0].rows == out[1].rows);
    CHECK(out[0].cols == out[1].cols);
    CHECK(out[0].rows == iota_vec(0, 6));
}

TEST_CASE("membership extraction input validation") {
    MixtureResult empty_mix;
    empty_mix.k_effective = 0;
    CHECK_THROWS_AS(extract_biclusters(empty_mix, 2, 2), ArgumentError);

    auto mix = make_mixture(5, {iota_vec(0, 5)});
    CHECK_THROWS_AS(extract_biclusters(mix, 4, 4), ArgumentError);
}

TEST_CASE("density fallback keeps features present in a strict majority") {
    // Two groups of identical embedding points so the density clusterer
    // returns them whole. Feature membership exercises the > 50% rule.
    const std::size_t n = 8;
    const auto manifest = make_manifest(n);
    std::vector<FeatureOccurrence> features{
        make_feature(n, {0, 1, 2, 3}),        // all of group A
        make_feature(n, {0, 1, 2, 3}),        // all of group A
        make_feature(n, {0, 1}),              // exactly half of A: excluded
        make_feature(n, {0, 1, 2}),           // 3 of 4: included
        make_feature(n, {4, 5, 6, 7}),        // all of group B
        make_feature(n, {4, 5, 6, 7, 0}),     // all of B plus one A straggler
    };
    const auto m = build_matrix(manifest, features);

    SpectralEmbedding e;
    e.d = 1;
    e.row_block = static_cast<int>(n);
    e.z = Eigen::MatrixXd::Zero(n + features.size(), 1);
    for (int i = 0; i < 4; ++i) e.z(i, 0) = 0.0;
    for (int i = 4; i < 8; ++i) e.z(i, 0) = 10.0;

    const auto out = hdbscan_fallback(e, m);
    REQUIRE(out.size() == 2);
    CHECK(out[0].rows == std::vector<int>{0, 1, 2, 3});
    CHECK(out[0].cols == std::vector<int>{0, 1, 3});
    CHECK(out[1].rows == std::vector<int>{4, 5, 6, 7});
    CHECK(out[1].cols == std::vector<int>{4, 5});
}

TEST_CASE("density fallback with no density structure finds nothing") {
    const std::size_t n = 10;
    const auto manifest = make_manifest(n);
    std::vector<std::uint32_t> all;
    for (std::uint32_t i = 0; i < n; ++i) all.push_back(i);
    std::vector<FeatureOccurrence> features{make_feature(n, all), make_feature(n, all)};
    const auto m = build_matrix(manifest, features);

    SpectralEmbedding e;
    e.d = 1;
    e.row_block = static_cast<int>(n);
    e.z = Eigen::MatrixXd::Zero(n + 2, 1);
    for (std::size_t i = 0; i < n; ++i) e.z(i, 0) = std::pow(2.0, static_cast<double>(i));
    CHECK(hdbscan_fallback(e, m).empty());
}

TEST_CASE("full pipeline recovers planted blocks") {
    // Feature 0 spans all samples and keeps the graph connected; the
    // blocks own features 1..30 and 31..60. The spanning feature sits
    // midway between the two groups in the embedding, so the fit hands
    // it to exactly one side.
    const std::size_t n = 40;
    const auto manifest = make_manifest(n);
    std::vector<std::uint32_t> all, blk_a, blk_b;
    for (std::uint32_t i = 0; i < n; ++i) all.push_back(i);
    for (std::uint32_t i = 0; i < 20; ++i) blk_a.push_back(i);
    for (std::uint32_t i = 20; i < 40; ++i) blk_b.push_back(i);
    std::vector<FeatureOccurrence> features;
    features.push_back(make_feature(n, all));
    for (int j = 0; j < 30; ++j) features.push_back(make_feature(n, blk_a));
    for (int j = 0; j < 30; ++j) features.push_back(make_feature(n, blk_b));

    for (Normalization norm : {Normalization::Scale, Normalization::Bistochastic}) {
        CAPTURE(static_cast<int>(norm));
        auto out = bicluster(manifest, features, norm, 2024);
        REQUIRE(out.size() == 2);
        std::sort(out.begin(), out.end(), [](const Bicluster& a, const Bicluster& b) {
            return a.row_ids.front() < b.row_ids.front();
        });
        CHECK(out[0].row_ids == blk_a);
        CHECK(out[1].row_ids == blk_b);

        auto own_cols = [](const Bicluster& b) {
            std::vector<std::size_t> cols;
            for (std::size_t id : b.col_ids)
                if (id != 0) cols.push_back(id);
            return cols;
        };
        std::vector<std::size_t> want_a, want_b;
        for (std::size_t j = 1; j <= 30; ++j) want_a.push_back(j);
        for (std::size_t j = 31; j <= 60; ++j) want_b.push_back(j);
        CHECK(own_cols(out[0]) == want_a);
        CHECK(own_cols(out[1]) == want_b);
        const int spanning_uses =
            static_cast<int>(out[0].col_ids.size() + out[1].col_ids.size()) - 60;
        CHECK(spanning_uses == 1);
    }
}

TEST_CASE("full pipeline on a uniform matrix returns one covering bicluster") {
    const std::size_t n = 10;
    const auto manifest = make_manifest(n);
    std::vector<std::uint32_t> all;
    for (std::uint32_t i = 0; i < n; ++i) all.push_back(i);
    std::vector<FeatureOccurrence> features;
    for (int j = 0; j < 10; ++j) features.push_back(make_feature(n, all));

    const auto out = bicluster(manifest, features, Normalization::Scale, 7);
    REQUIRE(out.size() == 1);
    CHECK(out[0].row_ids == all);
    REQUIRE(out[0].col_ids.size() == 10);
}

TEST_CASE("full pipeline finds nothing in unstructured noise") {
    // i.i.d. coin flips carry no co-occurrence blocks. The mixture
    // settles on one broad component covering the whole matrix; that
    // candidate is mostly empty cells, so it is discarded rather than
    // reported as structure.
    const std::size_t n = 20;
    const auto manifest = make_manifest(n);
    for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
        CAPTURE(seed);
        SplitMix64 rng(seed);
        std::vector<FeatureOccurrence> features;
        for (int j = 0; j < 20; ++j) {
            std::vector<std::uint32_t> members;
            for (std::uint32_t i = 0; i < n; ++i)
                if (rng.next_unit() < 0.5) members.push_back(i);
            if (members.empty()) members.push_back(0);
            features.push_back(make_feature(n, members, static_cast<std::uint8_t>(j)));
        }
        CHECK(bicluster(manifest, features, Normalization::Scale, seed).empty());
    }
}

TEST_CASE("full pipeline is deterministic and permutation equivariant") {
    const std::size_t n = 12;
    std::vector<std::uint32_t> blk_a, blk_b;
    for (std::uint32_t i = 0; i < 6; ++i) blk_a.push_back(i);
    for (std::uint32_t i = 6; i < 12; ++i) blk_b.push_back(i);

    const auto manifest = make_manifest(n);
    std::vector<std::uint32_t> everyone;
    for (std::uint32_t i = 0; i < n; ++i) everyone.push_back(i);
    std::vector<FeatureOccurrence> features;
    features.push_back(make_feature(n, everyone));
    for (int j = 0; j < 6; ++j) features.push_back(make_feature(n, blk_a));
    for (int j = 0; j < 6; ++j) features.push_back(make_feature(n, blk_b));

    const auto base = bicluster(manifest, features, Normalization::Scale, 55);
    const auto again = bicluster(manifest, features, Normalization::Scale, 55);
    REQUIRE(base.size() == again.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(base[i].row_ids == again[i].row_ids);
        CHECK(base[i].col_ids == again[i].col_ids);
    }

    // Reverse the sample ids: row id i becomes n-1-i.
    std::vector<FeatureOccurrence> reversed;
    for (const auto& f : features) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t i : f.file_set.members())
            members.push_back(static_cast<std::uint32_t>(n - 1 - i));
        reversed.push_back(make_feature(n, members));
    }
    auto perm = bicluster(manifest, reversed, Normalization::Scale, 55);
    REQUIRE(perm.size() == base.size());
    auto as_sets = [n](const std::vector<Bicluster>& bs, bool map_rows) {
        std::set<std::set<std::uint32_t>> rows;
        std::set<std::set<std::size_t>> cols;
        for (const auto& b : bs) {
            std::set<std::uint32_t> rs;
            for (std::uint32_t i : b.row_ids)
                rs.insert(map_rows ? static_cast<std::uint32_t>(n - 1 - i) : i);
            rows.insert(std::move(rs));
            cols.insert(std::set<std::size_t>(b.col_ids.begin(), b.col_ids.end()));
        }
        return std::make_pair(rows, cols);
    };
    CHECK(as_sets(perm, true) == as_sets(base, false));
}

TEST_CASE("full pipeline propagates degenerate-matrix errors") {
    const auto manifest = make_manifest(3);
    std::vector<FeatureOccurrence> one{make_feature(3, {0, 1, 2})};
    CHECK_THROWS_AS(bicluster(manifest, one, Normalization::Scale, 1), InsufficientSignal);
}

}  // TEST_SUITE
