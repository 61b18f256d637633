#include <doctest.h>

#include "namelink/string_metrics.hpp"
#include "namelink/unicode.hpp"

#include "oracles.hpp"

using namespace namelink;

TEST_CASE("levenshtein basics") {
    CHECK(levenshtein(std::string_view("ANNA"), std::string_view("ANNA")) == 0);
    CHECK(levenshtein(std::string_view("KITTEN"), std::string_view("SITTING")) ==
          oracle::levenshtein_matrix(U"KITTEN", U"SITTING"));
    CHECK(levenshtein(std::string_view("KITTEN"), std::string_view("SITTING")) == 3);
    CHECK(levenshtein(std::string_view(""), std::string_view("ABC")) == 3);
    CHECK(levenshtein(std::string_view("ABC"), std::string_view("")) == 3);
}

TEST_CASE("levenshtein agrees with the full-matrix oracle on random pairs") {
    SplitMix64 rng(0xC0FFEE);
    for (int k = 0; k < 1000; ++k) {
        const std::u32string a = oracle::random_name(rng, 0, 12, 6);
        const std::u32string b = oracle::random_name(rng, 0, 12, 6);
        CAPTURE(utf8_encode(a));
        CAPTURE(utf8_encode(b));
        REQUIRE(levenshtein(std::u32string_view(a), std::u32string_view(b)) ==
                oracle::levenshtein_matrix(a, b));
    }
}

TEST_CASE("levenshtein symmetry and triangle inequality") {
    SplitMix64 rng(0xBEEF);
    for (int k = 0; k < 500; ++k) {
        const std::u32string a = oracle::random_name(rng, 0, 10, 5);
        const std::u32string b = oracle::random_name(rng, 0, 10, 5);
        const std::u32string c = oracle::random_name(rng, 0, 10, 5);
        const int ab = levenshtein(std::u32string_view(a), std::u32string_view(b));
        const int ba = levenshtein(std::u32string_view(b), std::u32string_view(a));
        const int bc = levenshtein(std::u32string_view(b), std::u32string_view(c));
        const int ac = levenshtein(std::u32string_view(a), std::u32string_view(c));
        CHECK(ab == ba);
        CHECK(ac <= ab + bc);
    }
}

TEST_CASE("jaro reference values") {
    CHECK(jaro(std::string_view("MARTHA"), std::string_view("MARTHA")) == doctest::Approx(1.0));
    // m=6, one transposition: (1 + 1 + 5/6) / 3
    CHECK(jaro(std::string_view("MARTHA"), std::string_view("MARHTA")) ==
          doctest::Approx(17.0 / 18.0).epsilon(1e-12));
    CHECK(jaro(std::string_view("ABC"), std::string_view("XYZ")) == doctest::Approx(0.0));
    CHECK(jaro(std::string_view(""), std::string_view("")) == doctest::Approx(1.0));
    CHECK(jaro(std::string_view(""), std::string_view("A")) == doctest::Approx(0.0));
}

TEST_CASE("jaro-winkler reference values") {
    // 0.944444 + 3 * 0.1 * (1 - 0.944444)
    CHECK(jaro_winkler(std::string_view("MARTHA"), std::string_view("MARHTA")) ==
          doctest::Approx(173.0 / 180.0).epsilon(1e-12));
    CHECK(jaro_winkler(std::string_view("X"), std::string_view("X")) == doctest::Approx(1.0));
    CHECK(jaro_winkler(std::string_view("ABCDEF"), std::string_view("ABCDXY")) >
          jaro(std::string_view("ABCDEF"), std::string_view("ABCDXY")));
}

TEST_CASE("jaro family matches the definitional oracle and stays in range") {
    SplitMix64 rng(0xA11CE);
    for (int k = 0; k < 2000; ++k) {
        const std::u32string a = oracle::random_name(rng, 0, 10, 8);
        const std::u32string b = oracle::random_name(rng, 0, 10, 8);
        const double j = jaro(std::u32string_view(a), std::u32string_view(b));
        const double jw = jaro_winkler(std::u32string_view(a), std::u32string_view(b));
        CAPTURE(utf8_encode(a));
        CAPTURE(utf8_encode(b));
        REQUIRE(j == doctest::Approx(oracle::jaro_definition(a, b)).epsilon(1e-12));
        REQUIRE(jw == doctest::Approx(oracle::jaro_winkler_definition(a, b)).epsilon(1e-12));
        REQUIRE(j >= 0.0);
        REQUIRE(jw <= 1.0);
        REQUIRE(jw >= j);
        REQUIRE(j == jaro(std::u32string_view(b), std::u32string_view(a)));
        REQUIRE((jw == 1.0) == (a == b));
    }
}

TEST_CASE("edit_script reference scripts") {
    const EditScript jon = edit_script(std::string_view("JON"), std::string_view("JOHN"));
    REQUIRE(jon.size() == 1);
    CHECK(jon.ops[0] == EditOp{EditKind::insertion, 2, U'H'});

    CHECK(edit_script(std::string_view("ANNA"), std::string_view("ANNA")).empty());

    const EditScript smith = edit_script(std::string_view("SMITH"), std::string_view("SMYTH"));
    REQUIRE(smith.size() == 1);
    CHECK(smith.ops[0] == EditOp{EditKind::substitution, 2, U'Y'});
}

TEST_CASE("edit_script length equals distance and replays to the target") {
    SplitMix64 rng(0x5EED);
    for (int k = 0; k < 10000; ++k) {
        const std::u32string a = oracle::random_name(rng, 0, 12, 6);
        const std::u32string b = oracle::random_name(rng, 0, 12, 6);
        const EditScript script = edit_script(std::u32string_view(a), std::u32string_view(b));
        CAPTURE(utf8_encode(a));
        CAPTURE(utf8_encode(b));
        REQUIRE(static_cast<int>(script.size()) ==
                levenshtein(std::u32string_view(a), std::u32string_view(b)));
        REQUIRE(apply_edit_script(std::u32string_view(a), script) == b);
    }
}

TEST_CASE("edit_script is deterministic") {
    const auto s1 = edit_script(std::string_view("SMITH"), std::string_view("SMYTHE"));
    const auto s2 = edit_script(std::string_view("SMITH"), std::string_view("SMYTHE"));
    CHECK(s1 == s2);
}

TEST_CASE("normalisation composes and uppercases") {
    CHECK(normalize_name("  josé  garcía ") == "JOSÉ GARCÍA");
    CHECK(normalize_name("o'brien") == "O'BRIEN");
    CHECK(normalize_name("anne-marie") == "ANNE-MARIE");
    CHECK(normalize_name("MARY   JO") == "MARY JO");
    CHECK(normalize_name("") == "");
}
