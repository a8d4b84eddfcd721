#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "sas/corpus.hpp"
#include "sas/rng.hpp"
#include "support/tempfile.hpp"

using namespace sas;

namespace {

const char* kQuestions =
    "QuestionId\tSubject\tScoreMin\tScoreMax\n"
    "1\tScience\t0\t2\n"
    "2\tBiology\t0\t3\n";

const char* kResponses =
    "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
    "10\t1\t0\t0\ttrain\tthe plant needs water\n"
    "11\t1\t1\t2\ttrain\tplants use sunlight and water\n"
    "12\t1\t2\t2\ttest\tphotosynthesis turns light into energy\n"
    "13\t2\t3\t2\ttrain\tthe cell wall protects the cell\n"
    "14\t2\t0\t1\tleaderboard\tno idea\n";

}  // namespace

TEST_CASE("load_dataset parses and validates") {
    testutil::TempDir dir;
    auto rpath = dir.file("responses.tsv", kResponses);
    auto qpath = dir.file("questions.tsv", kQuestions);
    Dataset ds = load_dataset(rpath, qpath);

    REQUIRE(ds.questions.size() == 2);
    REQUIRE(ds.responses.size() == 5);
    CHECK(ds.question(1).score_max == 2);
    CHECK(ds.question(2).subject == Subject::Biology);
    CHECK(ds.responses[0].text == "the plant needs water");
    CHECK(ds.responses[2].partition == Partition::Test);

    // hand count of the fixture
    CHECK(ds.select(1, Partition::Train).size() == 2);
    CHECK(ds.select(1, Partition::Test).size() == 1);
    CHECK(ds.select(1, Partition::Leaderboard).empty());
    CHECK(ds.select(2, Partition::Leaderboard).size() == 1);
    CHECK(ds.select(1).size() == 3);

    // partition counts sum to question totals
    for (const auto& q : ds.questions) {
        size_t total = 0;
        for (Partition p : {Partition::Train, Partition::Leaderboard, Partition::Test})
            total += ds.select(q.question_id, p).size();
        CHECK(total == ds.select(q.question_id).size());
    }
}

TEST_CASE("gold_score selects rater 1") {
    Response r;
    r.score_rater1 = 2;
    r.score_rater2 = 3;
    CHECK(gold_score(r) == 2);
    r.score_rater1 = 0;
    r.score_rater2 = 0;
    CHECK(gold_score(r) == 0);
}

TEST_CASE("gold vector equals Score1 column verbatim") {
    testutil::TempDir dir;
    std::string rows = "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n";
    std::vector<int> expected;
    for (int i = 0; i < 10; ++i) {
        const int s1 = i % 3, s2 = (i + 1) % 3;
        expected.push_back(s1);
        rows += std::to_string(100 + i) + "\t1\t" + std::to_string(s1) + "\t" +
                std::to_string(s2) + "\ttrain\tresponse number " + std::to_string(i) + "\n";
    }
    Dataset ds = load_dataset(dir.file("r.tsv", rows), dir.file("q.tsv", kQuestions));
    std::vector<int> got;
    for (const auto& r : ds.responses) got.push_back(gold_score(r));
    CHECK(got == expected);
}

TEST_CASE("three-row file matches a hand count") {
    testutil::TempDir dir;
    Dataset ds = load_dataset(dir.file("r.tsv",
                                       "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
                                       "1\t1\t0\t0\ttrain\tfirst answer\n"
                                       "2\t1\t1\t1\tleaderboard\tsecond answer\n"
                                       "3\t1\t2\t2\ttest\tthird answer\n"),
                              dir.file("q.tsv", kQuestions));
    REQUIRE(ds.responses.size() == 3);
    CHECK(ds.select(1, Partition::Train).size() == 1);
    CHECK(ds.select(1, Partition::Leaderboard).size() == 1);
    CHECK(ds.select(1, Partition::Test).size() == 1);
}

TEST_CASE("header-only file loads as empty dataset") {
    testutil::TempDir dir;
    Dataset ds = load_dataset(dir.file("r.tsv", "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"),
                              dir.file("q.tsv", kQuestions));
    CHECK(ds.responses.empty());
    CHECK(ds.questions.size() == 2);
}

TEST_CASE("load errors carry line numbers") {
    testutil::TempDir dir;
    auto qpath = dir.file("q.tsv", kQuestions);

    SECTION("missing file") {
        CHECK_THROWS_AS(load_dataset(dir.path("nope.tsv"), qpath), ParseError);
    }
    SECTION("wrong column count") {
        auto rpath = dir.file("r.tsv",
                              "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
                              "10\t1\t0\t0\ttrain\n");
        try {
            load_dataset(rpath, qpath);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
        }
    }
    SECTION("non-integer score") {
        auto rpath = dir.file("r.tsv",
                              "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
                              "10\t1\t0\t0\ttrain\tok fine\n"
                              "11\t1\tx\t0\ttrain\tbad\n");
        try {
            load_dataset(rpath, qpath);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 3);
            CHECK(std::string(e.what()).find("Score1") != std::string::npos);
        }
    }
    SECTION("score outside scale") {
        auto rpath = dir.file("r.tsv",
                              "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
                              "10\t1\t3\t0\ttrain\ttoo high\n");
        CHECK_THROWS_WITH(load_dataset(rpath, qpath),
                          Catch::Matchers::ContainsSubstring("outside declared scale"));
    }
    SECTION("unknown question id") {
        auto rpath = dir.file("r.tsv",
                              "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
                              "10\t9\t0\t0\ttrain\tmystery\n");
        CHECK_THROWS_WITH(load_dataset(rpath, qpath),
                          Catch::Matchers::ContainsSubstring("unknown question id 9"));
    }
    SECTION("duplicate response id") {
        auto rpath = dir.file("r.tsv",
                              "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
                              "10\t1\t0\t0\ttrain\tfirst\n"
                              "10\t1\t1\t1\ttrain\tsecond\n");
        CHECK_THROWS_WITH(load_dataset(rpath, qpath),
                          Catch::Matchers::ContainsSubstring("duplicate response id"));
    }
    SECTION("invalid utf8") {
        std::string rows = "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n10\t1\t0\t0\ttrain\tbad ";
        rows += static_cast<char>(0xFF);
        rows += "\n";
        CHECK_THROWS_WITH(load_dataset(dir.file("r.tsv", rows), qpath),
                          Catch::Matchers::ContainsSubstring("UTF-8"));
    }
    SECTION("bad partition") {
        auto rpath = dir.file("r.tsv",
                              "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
                              "10\t1\t0\t0\tTrain\tcase matters\n");
        CHECK_THROWS_AS(load_dataset(rpath, qpath), ParseError);
    }
}

TEST_CASE("question file validation") {
    testutil::TempDir dir;
    CHECK_THROWS_AS(load_questions(dir.file("q.tsv", "QuestionId\tSubject\tScoreMin\tScoreMax\n"
                                                     "1\tScience\t2\t2\n")),
                    ParseError);
    CHECK_THROWS_AS(load_questions(dir.file("q2.tsv", "QuestionId\tSubject\tScoreMin\tScoreMax\n"
                                                      "1\tScience\t-1\t2\n")),
                    ParseError);
    CHECK_THROWS_AS(load_questions(dir.file("q3.tsv", "QuestionId\tSubject\tScoreMin\tScoreMax\n"
                                                      "1\tScience\t0\t2\n"
                                                      "1\tELA\t0\t3\n")),
                    ParseError);
}

TEST_CASE("corrupted files raise parse errors, never crash") {
    testutil::TempDir dir;
    auto qpath = dir.file("q.tsv", kQuestions);
    Rng rng(161);
    const std::string valid(kResponses);
    for (int trial = 0; trial < 200; ++trial) {
        std::string mutated = valid;
        const size_t flips = 1 + rng.bounded(4);
        for (size_t f = 0; f < flips; ++f)
            mutated[rng.bounded(mutated.size())] =
                static_cast<char>(rng.bounded(256));
        auto rpath = dir.file("fuzz.tsv", mutated);
        try {
            Dataset ds = load_dataset(rpath, qpath);
            CHECK(ds.responses.size() <= 5);  // mutation may drop rows, never add
        } catch (const ParseError&) {
            // expected for most mutations
        }
    }
}

TEST_CASE("round trip preserves all fields") {
    testutil::TempDir dir;
    // text with an embedded tab survives because Text is the final column
    std::string rows =
        "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n"
        "10\t1\t0\t2\ttrain\tkeeps\tits tab and trailing spaces  \n"
        "11\t2\t3\t3\ttest\tunicode: caf\xc3\xa9\n";
    Dataset ds = load_dataset(dir.file("r.tsv", rows), dir.file("q.tsv", kQuestions));
    REQUIRE(ds.responses.size() == 2);
    CHECK(ds.responses[0].text == "keeps\tits tab and trailing spaces  ");

    std::ostringstream rout, qout;
    save_responses(ds, rout);
    save_questions(ds, qout);
    CHECK(rout.str() == rows);
    CHECK(qout.str() == kQuestions);

    // loading the serialized output reproduces the dataset
    Dataset ds2 = load_dataset(dir.file("r2.tsv", rout.str()), dir.file("q2.tsv", qout.str()));
    REQUIRE(ds2.responses.size() == ds.responses.size());
    for (size_t i = 0; i < ds.responses.size(); ++i) {
        CHECK(ds2.responses[i].response_id == ds.responses[i].response_id);
        CHECK(ds2.responses[i].text == ds.responses[i].text);
        CHECK(ds2.responses[i].partition == ds.responses[i].partition);
    }
}
