#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sas/common.hpp"
#include "sas/porter.hpp"

namespace sas {

struct TokenSequence {
    std::vector<std::string> tokens;         // lowercase, in order
    std::vector<size_t> sentence_boundaries; // token index just past each sentence

    size_t sentence_count() const { return sentence_boundaries.size(); }

    // [begin, end) token range of sentence s
    std::pair<size_t, size_t> sentence(size_t s) const {
        size_t begin = s == 0 ? 0 : sentence_boundaries[s - 1];
        return {begin, sentence_boundaries[s]};
    }
};

namespace detail {
inline bool is_token_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'';
}
inline bool is_sentence_punct(char c) { return c == '.' || c == '!' || c == '?'; }
inline char lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
}  // namespace detail

// Tokens are maximal runs of letters/digits/apostrophes, lowercased. Sentence
// boundaries fire on . ! ? runs and on blank lines.
inline TokenSequence tokenize(std::string_view text) {
    TokenSequence seq;
    std::string current;
    size_t last_boundary = 0;
    auto flush_token = [&] {
        if (!current.empty()) {
            seq.tokens.push_back(current);
            current.clear();
        }
    };
    auto boundary = [&] {
        if (seq.tokens.size() > last_boundary) {
            seq.sentence_boundaries.push_back(seq.tokens.size());
            last_boundary = seq.tokens.size();
        }
    };
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (detail::is_token_char(c)) {
            current += detail::lower_ascii(c);
            continue;
        }
        flush_token();
        if (detail::is_sentence_punct(c)) {
            while (i + 1 < text.size() && detail::is_sentence_punct(text[i + 1])) ++i;
            boundary();
        } else if (c == '\n') {
            size_t j = i + 1;
            while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) ++j;
            if (j < text.size() && text[j] == '\n') {
                boundary();
                i = j;
            }
        }
    }
    flush_token();
    boundary();
    return seq;
}

struct UnitKind {
    enum class Family { Word, Stem, CharNgram, WordNgram, DepTriple, DepPartial };
    Family family = Family::Word;
    int n_min = 1;
    int n_max = 1;

    static UnitKind word() { return {Family::Word, 1, 1}; }
    static UnitKind stem() { return {Family::Stem, 1, 1}; }
    static UnitKind char_ngram(int n) { return {Family::CharNgram, n, n}; }
    static UnitKind word_ngram(int n) { return {Family::WordNgram, n, n}; }
    static UnitKind pooled_word_ngram(int lo, int hi) { return {Family::WordNgram, lo, hi}; }

    bool operator==(const UnitKind&) const = default;
};

using UnitCounts = std::unordered_map<std::string, long long>;

inline long long total_count(const UnitCounts& u) {
    long long t = 0;
    for (const auto& [unit, c] : u) t += c;
    return t;
}

// Lowercases and collapses whitespace runs to one space; char ngrams slide
// over this normalized form.
inline std::string normalize_for_char_ngrams(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += detail::lower_ascii(c);
    }
    return out;
}

inline UnitCounts extract_units(const TokenSequence& seq, std::string_view raw_text, const UnitKind& kind) {
    UnitCounts out;
    switch (kind.family) {
        case UnitKind::Family::Word:
            for (const auto& t : seq.tokens) ++out[t];
            break;
        case UnitKind::Family::Stem:
            for (const auto& t : seq.tokens) ++out[porter_stem(t)];
            break;
        case UnitKind::Family::WordNgram:
            for (int n = kind.n_min; n <= kind.n_max; ++n) {
                if (n < 1) throw std::invalid_argument("word ngram order must be >= 1");
                if (seq.tokens.size() < static_cast<size_t>(n)) continue;
                for (size_t i = 0; i + n <= seq.tokens.size(); ++i) {
                    std::string unit = seq.tokens[i];
                    for (int k = 1; k < n; ++k) {
                        unit += '_';
                        unit += seq.tokens[i + k];
                    }
                    ++out[unit];
                }
            }
            break;
        case UnitKind::Family::CharNgram: {
            std::string norm = normalize_for_char_ngrams(raw_text);
            for (int n = kind.n_min; n <= kind.n_max; ++n) {
                if (n < 1) throw std::invalid_argument("char ngram order must be >= 1");
                if (norm.size() < static_cast<size_t>(n)) continue;
                for (size_t i = 0; i + n <= norm.size(); ++i) ++out[norm.substr(i, n)];
            }
            break;
        }
        default:
            throw std::invalid_argument("dependency units come from annotations, not text");
    }
    return out;
}

struct Vocabulary {
    UnitKind kind;
    std::vector<std::pair<std::string, long long>> entries;  // freq desc, unit asc on ties
    int top_k = 0;

    size_t size() const { return entries.size(); }

    std::unordered_map<std::string, int> index() const {
        std::unordered_map<std::string, int> idx;
        idx.reserve(entries.size());
        for (size_t i = 0; i < entries.size(); ++i) idx[entries[i].first] = static_cast<int>(i);
        return idx;
    }
};

inline Vocabulary build_vocab(const std::vector<UnitCounts>& train_units, const UnitKind& kind, int top_k) {
    if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
    std::unordered_map<std::string, long long> totals;
    for (const auto& u : train_units)
        for (const auto& [unit, c] : u) totals[unit] += c;
    std::vector<std::pair<std::string, long long>> entries(totals.begin(), totals.end());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (entries.size() > static_cast<size_t>(top_k)) entries.resize(top_k);
    return Vocabulary{kind, std::move(entries), top_k};
}

// Count vector aligned to the vocabulary: index i <-> entries[i].
inline std::vector<double> vectorize(const std::unordered_map<std::string, int>& vocab_index,
                                     size_t vocab_size, const UnitCounts& units) {
    std::vector<double> v(vocab_size, 0.0);
    for (const auto& [unit, c] : units) {
        auto it = vocab_index.find(unit);
        if (it != vocab_index.end()) v[it->second] += static_cast<double>(c);
    }
    return v;
}

}  // namespace sas
