#include <catch2/catch_amalgamated.hpp>

#include "sas/rng.hpp"
#include "sas/shallow.hpp"
#include "sas/wordlist.hpp"
#include "support/tempfile.hpp"

using namespace sas;

TEST_CASE("segment ordinals and finally marker") {
    DiscourseSegmentation seg = segment_discourse("First, A. Second, B. Finally, C.");
    REQUIRE(seg.units.size() == 3);
    CHECK(seg.units[0].trigger == Trigger::Number);
    CHECK(seg.units[0].number == 1);
    CHECK(seg.units[1].trigger == Trigger::Number);
    CHECK(seg.units[1].number == 2);
    CHECK(seg.units[2].trigger == Trigger::FinallyMarker);
    CHECK(seg.numbered_list_length == 2);
    CHECK(seg.max_bullet_number == 2);

    auto f = discourse_features(seg);
    CHECK(f == std::array<double, 5>{3, 2, 2, 1, 0});
}

TEST_CASE("segment empty text") {
    DiscourseSegmentation seg = segment_discourse("");
    CHECK(seg.units.empty());
    CHECK(seg.numbered_list_length == 0);
    CHECK(seg.max_bullet_number == 0);
    CHECK(discourse_features(seg) == std::array<double, 5>{0, 0, 0, 0, 0});
}

TEST_CASE("segment digit numbering") {
    DiscourseSegmentation seg = segment_discourse("1. cell wall 2. nucleus 3. vacuole");
    REQUIRE(seg.units.size() == 3);
    for (const auto& u : seg.units) CHECK(u.trigger == Trigger::Number);
    CHECK(seg.units[0].span == "1. cell wall");
    CHECK(seg.units[1].span == "2. nucleus");
    CHECK(seg.units[2].span == "3. vacuole");
    CHECK(seg.numbered_list_length == 3);
    CHECK(seg.max_bullet_number == 3);
}

TEST_CASE("segment bullets at line starts") {
    DiscourseSegmentation seg = segment_discourse("- first item\n- second item\n* third item");
    REQUIRE(seg.units.size() == 3);
    for (const auto& u : seg.units) CHECK(u.trigger == Trigger::Bullet);
    // hyphen mid-line is not a bullet
    DiscourseSegmentation seg2 = segment_discourse("a well-formed answer.");
    CHECK(seg2.units.size() == 1);
    CHECK(seg2.units[0].trigger == Trigger::None);
}

TEST_CASE("segment parenthesized numbers and numbered run logic") {
    DiscourseSegmentation seg = segment_discourse("(1) roots (2) stems (4) leaves");
    REQUIRE(seg.units.size() == 3);
    CHECK(seg.numbered_list_length == 2);  // 1,2 then 4 breaks the run
    CHECK(seg.max_bullet_number == 4);
}

TEST_CASE("furthermore category counts connective-headed units") {
    DiscourseSegmentation seg =
        segment_discourse("Plants need light. Moreover, they need water; in addition, they need air.");
    auto f = discourse_features(seg);
    CHECK(f[4] == 2);  // moreover + in addition
    CHECK(f[3] == 0);

    // however counts toward the furthermore category
    auto f2 = discourse_features(segment_discourse("It rains. However, deserts stay dry."));
    CHECK(f2[4] == 1);

    // marker-headed units never exceed the unit count
    CHECK(f[0] >= f[3] + f[4]);
    CHECK(f2[0] >= f2[3] + f2[4]);
}

TEST_CASE("connectives only fire clause-initially") {
    auto f = discourse_features(segment_discourse("They also need water and more also here."));
    CHECK(f[4] == 0);
    CHECK(f[0] == 1);
}

TEST_CASE("segmentation invariants hold on random text") {
    Rng rng(2718);
    const std::vector<std::string> pieces = {
        "First,",  "second", "1.",       "(3)",  "finally,", "- item", "word",  "two words",
        "3.5",     "(",      "however,", "\n",   "also",     ". ",     "; and", "moreover",
        "a. b. c", "10)",    "???",      "\n\n", "in addition,", ":"};
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        const size_t n = rng.bounded(14);
        for (size_t i = 0; i < n; ++i) {
            text += pieces[rng.bounded(pieces.size())];
            text += ' ';
        }
        DiscourseSegmentation seg = segment_discourse(text);
        auto f = discourse_features(seg);
        for (double v : f) CHECK(v >= 0);
        CHECK(f[0] >= f[3] + f[4]);
        int number_units = 0;
        for (const auto& u : seg.units) {
            CHECK(!u.span.empty());
            if (u.trigger == Trigger::Number) ++number_units;
        }
        CHECK(seg.numbered_list_length <= number_units);
        CHECK(f[0] == static_cast<double>(seg.units.size()));
    }
}

TEST_CASE("custom marker lexicon loads from file") {
    testutil::TempDir dir;
    auto path = dir.file("markers.txt", "To Sum Up\nall in all\n\n");
    auto list = load_marker_list(path);
    REQUIRE(list.size() == 2);
    CHECK(list[0] == "to sum up");

    MarkerLexicons lex = MarkerLexicons::defaults();
    lex.finally_markers = list;
    auto f = discourse_features(segment_discourse("X. To sum up, Y.", lex));
    CHECK(f[3] == 1);
}

TEST_CASE("length features") {
    TokenSequence seq = tokenize("The cat sat.");
    CHECK(length_features(seq, "The cat sat.") == std::array<double, 3>{12, 3, 1});
    CHECK(length_features(tokenize(""), "") == std::array<double, 3>{0, 0, 0});

    // multibyte characters count as single scalars
    const std::string uni = "caf\xc3\xa9";
    CHECK(length_features(tokenize(uni), uni)[0] == 4);
}

TEST_CASE("length features match independent counter on long fixture") {
    std::string text;
    size_t words = 0;
    for (int s = 0; s < 40; ++s) {
        for (int w = 0; w < 5; ++w) {
            text += "word" + std::to_string(w) + " ";
            ++words;
        }
        text.back() = '.';
        text += " ";
    }
    TokenSequence seq = tokenize(text);
    auto f = length_features(seq, text);
    CHECK(f[0] == static_cast<double>(text.size()));  // all-ASCII fixture
    CHECK(f[1] == static_cast<double>(words));
    CHECK(f[2] == 40);
}

TEST_CASE("wellformedness heuristic counts planted errors") {
    WordLexicon lex{"the", "cat", "sat", "on", "mat", "and", "then", "it", "slept", "soundly"};

    // clean sentence: all zeros
    ErrorCounts clean = wellformedness_features(tokenize("The cat sat."), "The cat sat.", lex);
    CHECK(clean.total() == 0);

    ErrorCounts dup = wellformedness_features(tokenize("the the cat"), "the the cat", lex);
    CHECK(dup.duplicate_words == 1);

    // planted: 2 misspellings, 1 duplicate, 1 lowercase start, 1 punctuation run
    const std::string text = "Teh cat sat on the the mat. it slept soundli!!!";
    ErrorCounts ec = wellformedness_features(tokenize(text), text, lex);
    CHECK(ec.misspellings == 2);               // teh, soundli
    CHECK(ec.duplicate_words == 1);            // the the
    CHECK(ec.lowercase_sentence_starts == 1);  // "it"
    CHECK(ec.punctuation_anomalies == 1);      // !!!
    CHECK(ec.as_features() == std::array<double, 5>{2, 1, 1, 1, 5});
}

TEST_CASE("wellformedness paren matching") {
    WordLexicon lex{"a", "b"};
    ErrorCounts ec = wellformedness_features(tokenize("a (b"), "a (b", lex);
    CHECK(ec.punctuation_anomalies == 1);
    ErrorCounts ec2 = wellformedness_features(tokenize("a b)"), "a b)", lex);
    CHECK(ec2.punctuation_anomalies == 1);
    ErrorCounts ec3 = wellformedness_features(tokenize("(a b)"), "(a b)", lex);
    CHECK(ec3.punctuation_anomalies == 0);
    CHECK_THROWS_AS(wellformedness_features(tokenize("a"), "a", WordLexicon{}),
                    std::invalid_argument);
}

TEST_CASE("bundled lexicon covers everyday words") {
    auto lex = bundled_word_lexicon();
    CHECK(lex.size() > 500);
    CHECK(lex.count("the"));
    CHECK(lex.count("plant"));
    CHECK(lex.count("because"));
}
