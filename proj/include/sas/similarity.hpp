#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "sas/textproc.hpp"

namespace sas {

// Cached n-gram counts (n = 1..4) for one token sequence, so all-pairs
// similarity does not rebuild maps per comparison.
struct BleuStats {
    std::array<std::unordered_map<std::string, int>, 4> ngrams;
    size_t len = 0;
};

inline BleuStats make_bleu_stats(const TokenSequence& seq) {
    BleuStats st;
    st.len = seq.tokens.size();
    for (int n = 1; n <= 4; ++n) {
        if (seq.tokens.size() < static_cast<size_t>(n)) break;
        auto& table = st.ngrams[n - 1];
        for (size_t i = 0; i + n <= seq.tokens.size(); ++i) {
            std::string g = seq.tokens[i];
            for (int k = 1; k < n; ++k) {
                g += '\x1f';
                g += seq.tokens[i + k];
            }
            ++table[g];
        }
    }
    return st;
}

// BLEU with modified precisions for n = 1..4, geometric mean and brevity
// penalty. Precisions for n >= 2 are add-one smoothed so short responses do
// not zero out; a zero unigram precision still gives 0.
inline double bleu(const BleuStats& candidate, const BleuStats& reference) {
    if (candidate.len == 0) return 0.0;
    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        long long matched = 0, total = 0;
        const auto& cand = candidate.ngrams[n - 1];
        const auto& ref = reference.ngrams[n - 1];
        for (const auto& [g, cnt] : cand) {
            total += cnt;
            auto it = ref.find(g);
            if (it != ref.end()) matched += std::min<long long>(cnt, it->second);
        }
        double precision;
        if (n == 1) {
            if (matched == 0) return 0.0;
            precision = static_cast<double>(matched) / static_cast<double>(total);
        } else {
            precision = static_cast<double>(matched + 1) / static_cast<double>(total + 1);
        }
        log_sum += std::log(precision);
    }
    double score = std::exp(log_sum / 4.0);
    if (candidate.len < reference.len)
        score *= std::exp(1.0 - static_cast<double>(reference.len) / static_cast<double>(candidate.len));
    return score;
}

inline double bleu(const TokenSequence& candidate, const TokenSequence& reference) {
    return bleu(make_bleu_stats(candidate), make_bleu_stats(reference));
}

// (BLEU(x,y) + BLEU(y,x)) / 2
inline double sym_bleu(const BleuStats& x, const BleuStats& y) {
    return 0.5 * (bleu(x, y) + bleu(y, x));
}

inline double sym_bleu(const TokenSequence& x, const TokenSequence& y) {
    return sym_bleu(make_bleu_stats(x), make_bleu_stats(y));
}

struct Neighbor {
    long long response_id = 0;
    double similarity = 0.0;
    int gold = 0;
};

struct KnnFeatures {
    double mean_score = 0.0;
    double weighted_mean_score = 0.0;
    std::vector<Neighbor> neighbors;
};

struct PoolEntry {
    long long response_id = 0;
    const BleuStats* stats = nullptr;
    int gold = 0;
};

// Top-k pool responses by symmetric BLEU (ties by response id ascending);
// features are the plain and the similarity-weighted mean of neighbor scores.
inline KnnFeatures knn_features(const BleuStats& query, const std::vector<PoolEntry>& pool,
                                size_t k = 8) {
    if (pool.empty()) throw std::invalid_argument("knn_features: empty pool");
    std::vector<Neighbor> all;
    all.reserve(pool.size());
    for (const auto& e : pool) all.push_back({e.response_id, sym_bleu(query, *e.stats), e.gold});
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.response_id < b.response_id;
    });
    if (all.size() > k) all.resize(k);
    KnnFeatures f;
    double sum = 0.0, wsum = 0.0, wtotal = 0.0;
    for (const auto& nb : all) {
        sum += nb.gold;
        wsum += nb.similarity * nb.gold;
        wtotal += nb.similarity;
    }
    f.mean_score = sum / static_cast<double>(all.size());
    f.weighted_mean_score = wtotal > 0.0 ? wsum / wtotal : f.mean_score;
    f.neighbors = std::move(all);
    return f;
}

}  // namespace sas
