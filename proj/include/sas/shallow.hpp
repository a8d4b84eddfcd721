#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sas/common.hpp"
#include "sas/textproc.hpp"

namespace sas {

enum class Trigger { None, Bullet, Number, FinallyMarker, FurthermoreMarker, HoweverMarker };

struct DiscourseUnit {
    std::string span;  // trimmed text of the unit, marker included
    Trigger trigger = Trigger::None;
    int number = 0;  // numeral attached to a Number trigger
};

struct DiscourseSegmentation {
    std::vector<DiscourseUnit> units;
    int numbered_list_length = 0;  // longest 1,2,3,... run over Number units
    int max_bullet_number = 0;     // largest numeral on any Number trigger
};

// Connective lexicons are configurable; ordinals double as numbering triggers
// and take precedence over their connective reading.
struct MarkerLexicons {
    std::vector<std::string> finally_markers;
    std::vector<std::string> furthermore_markers;
    std::vector<std::string> however_markers;
    std::unordered_map<std::string, int> ordinals;

    static MarkerLexicons defaults() {
        MarkerLexicons lex;
        lex.finally_markers = {"finally", "in conclusion", "to conclude", "lastly",
                               "in summary", "thus", "therefore"};
        lex.furthermore_markers = {"furthermore", "moreover", "in addition", "additionally",
                                   "also", "second", "secondly", "third", "thirdly"};
        lex.however_markers = {"however", "on the other hand"};
        lex.ordinals = {{"first", 1},   {"firstly", 1}, {"second", 2}, {"secondly", 2},
                        {"third", 3},   {"thirdly", 3}, {"fourth", 4}, {"fourthly", 4},
                        {"fifth", 5},   {"sixth", 6},   {"seventh", 7}, {"eighth", 8},
                        {"ninth", 9},   {"tenth", 10}};
        return lex;
    }
};

inline std::vector<std::string> load_marker_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string entry = to_lower_ascii(trim_view(line));
        if (!entry.empty()) out.push_back(entry);
    }
    return out;
}

namespace detail {

inline bool is_word_char(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Matches a lowercase phrase at text[i..] case-insensitively, requiring a
// non-letter (or end) right after. Returns the match length or 0.
inline size_t match_phrase(std::string_view text, size_t i, const std::string& phrase) {
    if (i + phrase.size() > text.size()) return 0;
    for (size_t k = 0; k < phrase.size(); ++k)
        if (lower_ascii(text[i + k]) != phrase[k]) return 0;
    size_t end = i + phrase.size();
    if (end < text.size() && is_word_char(text[end])) return 0;
    return phrase.size();
}

inline size_t match_longest(std::string_view text, size_t i, const std::vector<std::string>& phrases) {
    size_t best = 0;
    for (const auto& p : phrases) best = std::max(best, match_phrase(text, i, p));
    return best;
}

}  // namespace detail

inline DiscourseSegmentation segment_discourse(std::string_view text,
                                               const MarkerLexicons& lex = MarkerLexicons::defaults()) {
    DiscourseSegmentation seg;
    bool in_unit = false;
    size_t unit_begin = 0;
    Trigger unit_trigger = Trigger::None;
    int unit_number = 0;

    auto close_unit = [&](size_t end) {
        if (!in_unit) return;
        std::string span = trim(text.substr(unit_begin, end - unit_begin));
        if (!span.empty()) seg.units.push_back({std::move(span), unit_trigger, unit_number});
        in_unit = false;
    };
    auto open_unit = [&](size_t begin, Trigger t, int number) {
        close_unit(begin);
        in_unit = true;
        unit_begin = begin;
        unit_trigger = t;
        unit_number = number;
    };

    bool clause_start = true;
    bool line_start = true;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '\n') {
            clause_start = line_start = true;
            ++i;
            continue;
        }
        // bullet glyph at line start
        if (line_start) {
            size_t glyph = 0;
            if (c == '-' || c == '*') glyph = 1;
            else if (text.substr(i).starts_with("\xe2\x80\xa2")) glyph = 3;
            if (glyph > 0) {
                open_unit(i, Trigger::Bullet, 0);
                i += glyph;
                clause_start = line_start = false;
                continue;
            }
        }
        // digit numbering: "1." / "1)" needing trailing space, or "(1)"
        if ((clause_start || line_start || (i > 0 && (text[i - 1] == ' ' || text[i - 1] == '\t' || text[i - 1] == '\n')))) {
            size_t p = i;
            bool paren = text[p] == '(';
            if (paren) ++p;
            size_t dstart = p;
            int value = 0;
            while (p < text.size() && text[p] >= '0' && text[p] <= '9' && p - dstart < 6)
                value = value * 10 + (text[p++] - '0');
            if (p > dstart) {
                bool matched = false;
                if (paren && p < text.size() && text[p] == ')') {
                    ++p;
                    matched = true;
                } else if (!paren && p < text.size() && (text[p] == '.' || text[p] == ')')) {
                    ++p;
                    matched = p >= text.size() || text[p] == ' ' || text[p] == '\t' ||
                              text[p] == '\n' || text[p] == '\r';
                }
                if (matched) {
                    open_unit(i, Trigger::Number, value);
                    i = p;
                    clause_start = line_start = false;
                    continue;
                }
            }
        }
        // spelled ordinals and connectives, clause-initial only
        if (clause_start && detail::is_word_char(c)) {
            size_t wlen = 0;
            while (i + wlen < text.size() && detail::is_word_char(text[i + wlen])) ++wlen;
            std::string word = to_lower_ascii(text.substr(i, wlen));
            auto ord = lex.ordinals.find(word);
            if (ord != lex.ordinals.end()) {
                open_unit(i, Trigger::Number, ord->second);
                i += wlen;
                clause_start = line_start = false;
                continue;
            }
            if (size_t m = detail::match_longest(text, i, lex.finally_markers)) {
                open_unit(i, Trigger::FinallyMarker, 0);
                i += m;
                clause_start = line_start = false;
                continue;
            }
            if (size_t m = detail::match_longest(text, i, lex.however_markers)) {
                open_unit(i, Trigger::HoweverMarker, 0);
                i += m;
                clause_start = line_start = false;
                continue;
            }
            if (size_t m = detail::match_longest(text, i, lex.furthermore_markers)) {
                open_unit(i, Trigger::FurthermoreMarker, 0);
                i += m;
                clause_start = line_start = false;
                continue;
            }
        }
        if (detail::is_sentence_punct(c)) {
            size_t run = i;
            while (run < text.size() && detail::is_sentence_punct(text[run])) ++run;
            close_unit(run);
            i = run;
            clause_start = true;
            continue;
        }
        if (c == ';' || c == ':') {
            clause_start = true;
            ++i;
            continue;
        }
        if (!in_unit) open_unit(i, Trigger::None, 0);
        clause_start = false;
        line_start = false;
        ++i;
    }
    close_unit(text.size());

    int best = 0, run = 0;
    for (const auto& u : seg.units) {
        if (u.trigger != Trigger::Number) continue;
        seg.max_bullet_number = std::max(seg.max_bullet_number, u.number);
        if (u.number == run + 1)
            ++run;
        else
            run = u.number == 1 ? 1 : 0;
        best = std::max(best, run);
    }
    seg.numbered_list_length = best;
    return seg;
}

// [unit count, numbered list length, max bullet number,
//  finally-category units, furthermore-category units]
inline std::array<double, 5> discourse_features(const DiscourseSegmentation& seg) {
    double finally_count = 0, furthermore_count = 0;
    for (const auto& u : seg.units) {
        if (u.trigger == Trigger::FinallyMarker) finally_count += 1;
        if (u.trigger == Trigger::FurthermoreMarker || u.trigger == Trigger::HoweverMarker)
            furthermore_count += 1;
    }
    return {static_cast<double>(seg.units.size()), static_cast<double>(seg.numbered_list_length),
            static_cast<double>(seg.max_bullet_number), finally_count, furthermore_count};
}

// [characters (unicode scalars), words, sentences]
inline std::array<double, 3> length_features(const TokenSequence& seq, std::string_view raw_text) {
    long chars = utf8_scalar_count(raw_text);
    if (chars < 0) chars = static_cast<long>(raw_text.size());  // unvalidated input: count bytes
    return {static_cast<double>(chars), static_cast<double>(seq.tokens.size()),
            static_cast<double>(seq.sentence_count())};
}

struct ErrorCounts {
    long misspellings = 0;
    long duplicate_words = 0;
    long lowercase_sentence_starts = 0;
    long punctuation_anomalies = 0;

    long total() const {
        return misspellings + duplicate_words + lowercase_sentence_starts + punctuation_anomalies;
    }

    std::array<double, 5> as_features() const {
        return {static_cast<double>(misspellings), static_cast<double>(duplicate_words),
                static_cast<double>(lowercase_sentence_starts),
                static_cast<double>(punctuation_anomalies), static_cast<double>(total())};
    }
};

using WordLexicon = std::unordered_set<std::string>;

inline WordLexicon load_word_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    WordLexicon lex;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = to_lower_ascii(trim_view(line));
        if (!w.empty()) lex.insert(w);
    }
    return lex;
}

// Heuristic error counts standing in for a grammatical error detector:
// unknown alphabetic tokens, immediate word repeats, lowercase sentence
// openers, and punctuation anomalies.
inline ErrorCounts wellformedness_features(const TokenSequence& seq, std::string_view raw_text,
                                           const WordLexicon& lexicon) {
    if (lexicon.empty()) throw std::invalid_argument("wellformedness_features: empty lexicon");
    ErrorCounts ec;
    for (const auto& t : seq.tokens) {
        bool alphabetic = !t.empty();
        for (char c : t)
            if (c < 'a' || c > 'z') {
                alphabetic = false;
                break;
            }
        if (alphabetic && !lexicon.count(t)) ++ec.misspellings;
    }
    for (size_t i = 1; i < seq.tokens.size(); ++i)
        if (seq.tokens[i] == seq.tokens[i - 1]) ++ec.duplicate_words;

    bool looking_for_start = true;
    for (char c : raw_text) {
        if (looking_for_start && detail::is_word_char(c)) {
            if (c >= 'a' && c <= 'z') ++ec.lowercase_sentence_starts;
            looking_for_start = false;
        } else if (detail::is_sentence_punct(c)) {
            looking_for_start = true;
        }
    }

    int paren_depth = 0;
    size_t i = 0;
    while (i < raw_text.size()) {
        char c = raw_text[i];
        unsigned char uc = static_cast<unsigned char>(c);
        if (uc < 0x80 && std::ispunct(uc)) {
            size_t run = i;
            while (run < raw_text.size() && raw_text[run] == c) ++run;
            if (run - i >= 3) ++ec.punctuation_anomalies;
            for (size_t k = i; k < run; ++k) {
                if (c == '(') ++paren_depth;
                if (c == ')') {
                    if (paren_depth > 0)
                        --paren_depth;
                    else
                        ++ec.punctuation_anomalies;
                }
            }
            i = run;
            continue;
        }
        ++i;
    }
    ec.punctuation_anomalies += paren_depth;
    return ec;
}

}  // namespace sas
