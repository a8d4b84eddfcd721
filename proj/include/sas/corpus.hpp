#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sas/common.hpp"

namespace sas {

enum class Subject { Science, ELA, Biology, Other };
enum class Partition { Train, Leaderboard, Test };

inline const char* subject_name(Subject s) {
    switch (s) {
        case Subject::Science: return "Science";
        case Subject::ELA: return "ELA";
        case Subject::Biology: return "Biology";
        default: return "Other";
    }
}

inline const char* partition_name(Partition p) {
    switch (p) {
        case Partition::Train: return "train";
        case Partition::Leaderboard: return "leaderboard";
        default: return "test";
    }
}

struct QuestionSpec {
    int question_id = 0;
    Subject subject = Subject::Other;
    int score_min = 0;
    int score_max = 0;

    int num_categories() const { return score_max - score_min + 1; }
};

struct Response {
    long long response_id = 0;
    int question_id = 0;
    std::string text;
    int score_rater1 = 0;
    int score_rater2 = 0;
    Partition partition = Partition::Train;
};

// Gold label is rater 1's score; rater 2 is kept for agreement reporting only.
inline int gold_score(const Response& r) { return r.score_rater1; }

class Dataset {
   public:
    std::vector<QuestionSpec> questions;
    std::vector<Response> responses;  // original file order

    const QuestionSpec& question(int qid) const {
        auto it = question_index_.find(qid);
        if (it == question_index_.end())
            throw std::invalid_argument("unknown question id " + std::to_string(qid));
        return questions[it->second];
    }

    bool has_question(int qid) const { return question_index_.count(qid) > 0; }

    bool has_response(long long rid) const { return response_ids_.count(rid) > 0; }

    std::vector<const Response*> select(int qid, Partition p) const {
        std::vector<const Response*> out;
        for (const Response& r : responses)
            if (r.question_id == qid && r.partition == p) out.push_back(&r);
        return out;
    }

    std::vector<const Response*> select(int qid) const {
        std::vector<const Response*> out;
        for (const Response& r : responses)
            if (r.question_id == qid) out.push_back(&r);
        return out;
    }

    void rebuild_index() {
        question_index_.clear();
        response_ids_.clear();
        for (size_t i = 0; i < questions.size(); ++i)
            question_index_[questions[i].question_id] = i;
        for (const Response& r : responses) response_ids_.insert(r.response_id);
    }

   private:
    std::unordered_map<int, size_t> question_index_;
    std::unordered_set<long long> response_ids_;
};

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

inline bool parse_subject(std::string_view s, Subject& out) {
    if (s == "Science") out = Subject::Science;
    else if (s == "ELA") out = Subject::ELA;
    else if (s == "Biology") out = Subject::Biology;
    else if (s == "Other") out = Subject::Other;
    else return false;
    return true;
}

inline bool parse_partition(std::string_view s, Partition& out) {
    if (s == "train") out = Partition::Train;
    else if (s == "leaderboard") out = Partition::Leaderboard;
    else if (s == "test") out = Partition::Test;
    else return false;
    return true;
}

}  // namespace detail

inline std::vector<QuestionSpec> load_questions(const std::string& path) {
    auto lines = detail::read_lines(path);
    if (lines.empty()) throw ParseError(path, 0, "missing header row");
    if (lines[0] != "QuestionId\tSubject\tScoreMin\tScoreMax")
        throw ParseError(path, 1, "unexpected header: " + lines[0]);
    std::vector<QuestionSpec> out;
    std::unordered_set<int> seen;
    for (size_t i = 1; i < lines.size(); ++i) {
        long lineno = static_cast<long>(i + 1);
        if (lines[i].empty()) continue;
        auto f = split_tabs(lines[i]);
        if (f.size() != 4) throw ParseError(path, lineno, "expected 4 columns, got " + std::to_string(f.size()));
        QuestionSpec q;
        long long qid, smin, smax;
        if (!parse_int(f[0], qid) || qid <= 0) throw ParseError(path, lineno, "bad QuestionId: " + f[0]);
        if (!detail::parse_subject(f[1], q.subject)) throw ParseError(path, lineno, "bad Subject: " + f[1]);
        if (!parse_int(f[2], smin)) throw ParseError(path, lineno, "bad ScoreMin: " + f[2]);
        if (!parse_int(f[3], smax)) throw ParseError(path, lineno, "bad ScoreMax: " + f[3]);
        q.question_id = static_cast<int>(qid);
        q.score_min = static_cast<int>(smin);
        q.score_max = static_cast<int>(smax);
        if (q.score_min < 0) throw ParseError(path, lineno, "ScoreMin must be >= 0");
        if (q.score_min >= q.score_max) throw ParseError(path, lineno, "ScoreMin must be < ScoreMax");
        if (!seen.insert(q.question_id).second)
            throw ParseError(path, lineno, "duplicate question id " + std::to_string(q.question_id));
        out.push_back(q);
    }
    return out;
}

inline Dataset load_dataset(const std::string& responses_path, const std::string& questions_path) {
    Dataset ds;
    ds.questions = load_questions(questions_path);
    std::unordered_map<int, const QuestionSpec*> qidx;
    for (const auto& q : ds.questions) qidx[q.question_id] = &q;

    auto lines = detail::read_lines(responses_path);
    if (lines.empty()) throw ParseError(responses_path, 0, "missing header row");
    if (lines[0] != "Id\tQuestionId\tScore1\tScore2\tPartition\tText")
        throw ParseError(responses_path, 1, "unexpected header: " + lines[0]);
    std::unordered_set<long long> seen_ids;
    for (size_t i = 1; i < lines.size(); ++i) {
        long lineno = static_cast<long>(i + 1);
        if (lines[i].empty()) continue;
        // text is the last column and may itself contain tabs
        auto f = split_tabs(lines[i], 6);
        if (f.size() != 6) throw ParseError(responses_path, lineno, "expected 6 columns, got " + std::to_string(f.size()));
        Response r;
        long long rid, qid, s1, s2;
        if (!parse_int(f[0], rid)) throw ParseError(responses_path, lineno, "bad Id: " + f[0]);
        if (!parse_int(f[1], qid) || qid <= 0) throw ParseError(responses_path, lineno, "bad QuestionId: " + f[1]);
        if (!parse_int(f[2], s1)) throw ParseError(responses_path, lineno, "non-integer Score1: " + f[2]);
        if (!parse_int(f[3], s2)) throw ParseError(responses_path, lineno, "non-integer Score2: " + f[3]);
        if (!detail::parse_partition(f[4], r.partition))
            throw ParseError(responses_path, lineno, "bad Partition (want train|leaderboard|test): " + f[4]);
        auto qit = qidx.find(static_cast<int>(qid));
        if (qit == qidx.end())
            throw ParseError(responses_path, lineno, "unknown question id " + std::to_string(qid));
        const QuestionSpec& q = *qit->second;
        if (s1 < q.score_min || s1 > q.score_max || s2 < q.score_min || s2 > q.score_max)
            throw ParseError(responses_path, lineno, "score outside declared scale " +
                                                         std::to_string(q.score_min) + "-" +
                                                         std::to_string(q.score_max));
        if (!seen_ids.insert(rid).second)
            throw ParseError(responses_path, lineno, "duplicate response id " + std::to_string(rid));
        if (trim_view(f[5]).empty())
            throw ParseError(responses_path, lineno, "empty response text");
        if (utf8_scalar_count(f[5]) < 0)
            throw ParseError(responses_path, lineno, "invalid UTF-8 in response text");
        r.response_id = rid;
        r.question_id = static_cast<int>(qid);
        r.score_rater1 = static_cast<int>(s1);
        r.score_rater2 = static_cast<int>(s2);
        r.text = f[5];
        ds.responses.push_back(std::move(r));
    }
    ds.rebuild_index();
    return ds;
}

inline void save_questions(const Dataset& ds, std::ostream& out) {
    out << "QuestionId\tSubject\tScoreMin\tScoreMax\n";
    for (const auto& q : ds.questions)
        out << q.question_id << '\t' << subject_name(q.subject) << '\t' << q.score_min << '\t'
            << q.score_max << '\n';
}

inline void save_responses(const Dataset& ds, std::ostream& out) {
    out << "Id\tQuestionId\tScore1\tScore2\tPartition\tText\n";
    for (const auto& r : ds.responses)
        out << r.response_id << '\t' << r.question_id << '\t' << r.score_rater1 << '\t'
            << r.score_rater2 << '\t' << partition_name(r.partition) << '\t' << r.text << '\n';
}

}  // namespace sas
