#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "sigforge/util.hpp"
#include "sigforge/yara_rule.hpp"

using namespace sigforge;

namespace {

YaraRule two_pattern_rule() {
    YaraRule r;
    r.name = "name";
    r.patterns = {{0xAA, 0xBB}, {0xCC, 0xDD}};
    r.clauses = {{2, {0, 1}}};
    return r;
}

// Random rule in the emitted subset: distinct patterns, clauses referencing
// declared patterns with in-range thresholds.
YaraRule random_rule(SplitMix64& rng, int index) {
    YaraRule r;
    r.name = "r" + std::to_string(index);

    const int pattern_count = 1 + static_cast<int>(rng.below(8));
    std::set<std::vector<std::uint8_t>> seen;
    while (static_cast<int>(r.patterns.size()) < pattern_count) {
        std::vector<std::uint8_t> p(1 + rng.below(12));
        for (auto& b : p) b = rng.next_byte();
        if (seen.insert(p).second) r.patterns.push_back(std::move(p));
    }

    const int clause_count = 1 + static_cast<int>(rng.below(3));
    for (int c = 0; c < clause_count; ++c) {
        std::vector<int> ids(r.patterns.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
        for (std::size_t i = 0; i + 1 < ids.size(); ++i)
            std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
        const auto len = 1 + rng.below(std::min<std::uint64_t>(ids.size(), 5));
        ids.resize(len);
        RuleClause clause;
        clause.feature_ids = std::move(ids);
        clause.threshold_t = 1 + static_cast<int>(rng.below(len));
        r.clauses.push_back(std::move(clause));
    }
    return r;
}

}  // namespace

TEST_SUITE("yara_rule") {

TEST_CASE("emits the canonical layout") {
    const std::string text = emit_yara(two_pattern_rule());
    CHECK(text ==
          "rule name\n"
          "{\n"
          "    strings:\n"
          "        $x0 = { AA BB }\n"
          "        $x1 = { CC DD }\n"
          "    condition:\n"
          "        (2 of ($x0,$x1))\n"
          "}\n");
}

TEST_CASE("identifier sanitization") {
    CHECK(sanitize_identifier("my family!") == "my_family_");
    CHECK(sanitize_identifier("Good_Name3") == "Good_Name3");
    CHECK(sanitize_identifier("9lives") == "_9lives");
    CHECK(sanitize_identifier("") == "unnamed");
    CHECK(sanitize_identifier("---") == "___");

    // Emission applies the sanitizer rather than failing.
    YaraRule r = two_pattern_rule();
    r.name = "my family!";
    CHECK(emit_yara(r).substr(0, 15) == "rule my_family_");
}

TEST_CASE("parse inverts emit structurally") {
    const YaraRule r = two_pattern_rule();
    const YaraRule back = parse_rule(emit_yara(r));
    CHECK(back == r);
    CHECK(back.clauses[0].threshold_t == 2);
    CHECK(back.clauses[0].feature_ids == std::vector<int>{0, 1});
}

TEST_CASE("round trip is byte identical on random rules") {
    SplitMix64 rng(0xF00D);
    for (int i = 0; i < 60; ++i) {
        CAPTURE(i);
        const YaraRule r = random_rule(rng, i);
        const std::string text = emit_yara(r);
        const YaraRule parsed = parse_rule(text);
        REQUIRE(parsed == r);
        REQUIRE(emit_yara(parsed) == text);
    }
}

TEST_CASE("whitespace between tokens is free-form") {
    const std::string squashed =
        "rule name{strings: $x0 = {AA BB} $x1={ CC\nDD }\tcondition: (2 of($x0 , $x1))}";
    CHECK(parse_rule(squashed) == two_pattern_rule());
}

TEST_CASE("all-of spelling is accepted and normalized to numeric form") {
    const YaraRule r = parse_rule(
        "rule name { strings: $x0 = { AA } $x1 = { BB } condition: (all of ($x0,$x1)) }");
    CHECK(r.clauses[0].threshold_t == 2);
    CHECK(emit_yara(r).find("(2 of ($x0,$x1))") != std::string::npos);
}

TEST_CASE("multi-clause conditions parse as a disjunction list") {
    const YaraRule r = parse_rule(
        "rule m { strings: $x0 = { 01 } $x1 = { 02 } $x2 = { 03 } "
        "condition: (2 of ($x0,$x1)) or (1 of ($x2)) }");
    REQUIRE(r.clauses.size() == 2);
    CHECK(r.clauses[0] == RuleClause{2, {0, 1}});
    CHECK(r.clauses[1] == RuleClause{1, {2}});
}

TEST_CASE("out-of-subset constructs are named in the error") {
    // Module reference in clause position.
    CHECK_THROWS_WITH_AS(
        parse_rule("rule m { strings: $x0 = { AA } condition: (pe.imphash() == \"x\") }"),
        doctest::Contains("unsupported construct: pe.imphash"), FormatError);
    // String modifier after a hex body.
    CHECK_THROWS_WITH_AS(
        parse_rule("rule m { strings: $x0 = { AA } wide condition: (1 of ($x0)) }"),
        doctest::Contains("unsupported construct: wide"), FormatError);
    // Wildcard and jump tokens inside a hex string.
    CHECK_THROWS_WITH_AS(
        parse_rule("rule m { strings: $x0 = { AA ?? } condition: (1 of ($x0)) }"),
        doctest::Contains("unsupported construct: ??"), FormatError);
    CHECK_THROWS_WITH_AS(
        parse_rule("rule m { strings: $x0 = { AA [4-6] BB } condition: (1 of ($x0)) }"),
        doctest::Contains("unsupported construct: [4-6]"), FormatError);
}

TEST_CASE("undeclared pattern references fail") {
    CHECK_THROWS_WITH_AS(
        parse_rule("rule m { strings: $x0 = { AA } condition: (2 of ($x0,$x1)) }"),
        doctest::Contains("undeclared pattern $x1"), FormatError);
}

TEST_CASE("patterns must be declared as x0..xN in order") {
    CHECK_THROWS_WITH_AS(
        parse_rule("rule m { strings: $x1 = { AA } condition: (1 of ($x1)) }"),
        doctest::Contains("$x0 was expected"), FormatError);
    CHECK_THROWS_AS(
        parse_rule("rule m { strings: $y0 = { AA } condition: (1 of ($y0)) }"), FormatError);
}

TEST_CASE("thresholds outside the clause size are rejected") {
    CHECK_THROWS_WITH_AS(
        parse_rule("rule m { strings: $x0 = { AA } $x1 = { BB } condition: (3 of ($x0,$x1)) }"),
        doctest::Contains("outside [1, 2]"), FormatError);
    CHECK_THROWS_AS(
        parse_rule("rule m { strings: $x0 = { AA } condition: (0 of ($x0)) }"), FormatError);
}

TEST_CASE("malformed input diagnostics") {
    CHECK_THROWS_AS(parse_rule(""), FormatError);
    CHECK_THROWS_AS(parse_rule("import \"pe\""), FormatError);
    CHECK_THROWS_AS(parse_rule("rule m { strings: condition: (1 of ($x0)) }"), FormatError);
    CHECK_THROWS_AS(parse_rule("rule m { strings: $x0 = { } condition: (1 of ($x0)) }"),
                    FormatError);
    CHECK_THROWS_AS(parse_rule("rule m { strings: $x0 = { AA "), FormatError);
    CHECK_THROWS_WITH_AS(
        parse_rule("rule m { strings: $x0 = { AA } condition: (1 of ($x0)) } extra"),
        doctest::Contains("trailing content"), FormatError);
}

TEST_CASE("emit validates rule structure") {
    YaraRule dup = two_pattern_rule();
    dup.patterns[1] = dup.patterns[0];
    CHECK_THROWS_WITH_AS(emit_yara(dup), doctest::Contains("pairwise distinct"), ArgumentError);

    YaraRule dangling = two_pattern_rule();
    dangling.clauses[0].feature_ids = {0, 7};
    CHECK_THROWS_WITH_AS(emit_yara(dangling), doctest::Contains("pattern 7"), ArgumentError);

    YaraRule no_clauses = two_pattern_rule();
    no_clauses.clauses.clear();
    CHECK_THROWS_AS(emit_yara(no_clauses), ArgumentError);

    YaraRule bad_threshold = two_pattern_rule();
    bad_threshold.clauses[0].threshold_t = 3;
    CHECK_THROWS_AS(emit_yara(bad_threshold), ArgumentError);
}

TEST_CASE("structural equality ignores provenance") {
    YaraRule a = two_pattern_rule();
    YaraRule b = two_pattern_rule();
    b.provenance.n = 64;
    b.provenance.score = 0.5;
    CHECK(a == b);
}

}  // TEST_SUITE
