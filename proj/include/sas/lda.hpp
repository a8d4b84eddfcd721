#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "sas/rng.hpp"

namespace sas {

// LDA fitted by collapsed Gibbs sampling. Kept deliberately small: dense
// count tables, single-threaded sweeps, per-question corpora.
struct TopicModel {
    int num_topics = 0;
    double alpha = 0.0;
    double beta = 0.01;
    int gibbs_iterations = 1000;
    uint64_t seed = 0;
    std::vector<std::string> vocab;
    std::unordered_map<std::string, int> vocab_index;
    std::vector<long long> topic_word;    // num_topics x vocab, row-major
    std::vector<long long> topic_totals;  // per topic

    // smoothed word distribution of one topic; sums to 1
    std::vector<double> phi(int k) const {
        const size_t v = vocab.size();
        std::vector<double> out(v);
        const double denom = static_cast<double>(topic_totals[k]) + beta * static_cast<double>(v);
        for (size_t w = 0; w < v; ++w)
            out[w] = (static_cast<double>(topic_word[k * v + w]) + beta) / denom;
        return out;
    }
};

inline TopicModel fit_lda(const std::vector<std::vector<std::string>>& documents, int num_topics,
                          uint64_t seed, int iterations = 1000) {
    if (num_topics < 1) throw std::invalid_argument("fit_lda: num_topics must be >= 1");
    TopicModel tm;
    tm.num_topics = num_topics;
    tm.alpha = 50.0 / num_topics;
    tm.beta = 0.01;
    tm.gibbs_iterations = iterations;
    tm.seed = seed;

    std::vector<std::vector<int>> docs;
    for (const auto& doc : documents) {
        std::vector<int> ids;
        ids.reserve(doc.size());
        for (const auto& w : doc) {
            auto [it, fresh] = tm.vocab_index.try_emplace(w, static_cast<int>(tm.vocab.size()));
            if (fresh) tm.vocab.push_back(w);
            ids.push_back(it->second);
        }
        if (!ids.empty()) docs.push_back(std::move(ids));
    }
    if (docs.empty()) throw std::invalid_argument("fit_lda: empty corpus");

    const size_t V = tm.vocab.size();
    const int K = num_topics;
    tm.topic_word.assign(static_cast<size_t>(K) * V, 0);
    tm.topic_totals.assign(K, 0);
    std::vector<std::vector<long long>> doc_topic(docs.size(), std::vector<long long>(K, 0));
    std::vector<std::vector<int>> assignments(docs.size());

    Rng rng(seed);
    for (size_t d = 0; d < docs.size(); ++d) {
        assignments[d].resize(docs[d].size());
        for (size_t i = 0; i < docs[d].size(); ++i) {
            int z = static_cast<int>(rng.bounded(K));
            assignments[d][i] = z;
            ++doc_topic[d][z];
            ++tm.topic_word[static_cast<size_t>(z) * V + docs[d][i]];
            ++tm.topic_totals[z];
        }
    }

    std::vector<double> weights(K);
    const double vbeta = tm.beta * static_cast<double>(V);
    for (int iter = 0; iter < iterations; ++iter) {
        for (size_t d = 0; d < docs.size(); ++d) {
            for (size_t i = 0; i < docs[d].size(); ++i) {
                const int w = docs[d][i];
                const int old_z = assignments[d][i];
                --doc_topic[d][old_z];
                --tm.topic_word[static_cast<size_t>(old_z) * V + w];
                --tm.topic_totals[old_z];
                double total = 0.0;
                for (int k = 0; k < K; ++k) {
                    const double p =
                        (static_cast<double>(doc_topic[d][k]) + tm.alpha) *
                        (static_cast<double>(tm.topic_word[static_cast<size_t>(k) * V + w]) + tm.beta) /
                        (static_cast<double>(tm.topic_totals[k]) + vbeta);
                    total += p;
                    weights[k] = total;
                }
                const double u = rng.next_unit() * total;
                int z = 0;
                while (z < K - 1 && weights[z] < u) ++z;
                assignments[d][i] = z;
                ++doc_topic[d][z];
                ++tm.topic_word[static_cast<size_t>(z) * V + w];
                ++tm.topic_totals[z];
            }
        }
    }
    return tm;
}

// Folds a new document into the fitted model (topic-word counts frozen) and
// returns smoothed topic proportions. Unknown words are skipped; a document
// with no known words gets the uniform prior.
inline std::vector<double> infer_topics(const TopicModel& tm, const std::vector<std::string>& tokens,
                                        uint64_t seed, int sweeps = 100) {
    const int K = tm.num_topics;
    const size_t V = tm.vocab.size();
    std::vector<int> ids;
    for (const auto& w : tokens) {
        auto it = tm.vocab_index.find(w);
        if (it != tm.vocab_index.end()) ids.push_back(it->second);
    }
    std::vector<long long> doc_topic(K, 0);
    std::vector<int> assignments(ids.size());
    Rng rng(seed);
    for (size_t i = 0; i < ids.size(); ++i) {
        int z = static_cast<int>(rng.bounded(K));
        assignments[i] = z;
        ++doc_topic[z];
    }
    std::vector<double> weights(K);
    const double vbeta = tm.beta * static_cast<double>(V);
    for (int iter = 0; iter < sweeps; ++iter) {
        for (size_t i = 0; i < ids.size(); ++i) {
            const int w = ids[i];
            --doc_topic[assignments[i]];
            double total = 0.0;
            for (int k = 0; k < K; ++k) {
                const double p =
                    (static_cast<double>(doc_topic[k]) + tm.alpha) *
                    (static_cast<double>(tm.topic_word[static_cast<size_t>(k) * V + w]) + tm.beta) /
                    (static_cast<double>(tm.topic_totals[k]) + vbeta);
                total += p;
                weights[k] = total;
            }
            const double u = rng.next_unit() * total;
            int z = 0;
            while (z < K - 1 && weights[z] < u) ++z;
            assignments[i] = z;
            ++doc_topic[z];
        }
    }
    std::vector<double> theta(K);
    const double denom = static_cast<double>(ids.size()) + tm.alpha * K;
    for (int k = 0; k < K; ++k)
        theta[k] = (static_cast<double>(doc_topic[k]) + tm.alpha) / denom;
    return theta;
}

// 40 topic weights: the 10-topic block then the 30-topic block.
inline std::vector<double> topic_features(const TopicModel& tm10, const TopicModel& tm30,
                                          const std::vector<std::string>& tokens, uint64_t seed,
                                          int sweeps = 100) {
    std::vector<double> out = infer_topics(tm10, tokens, derive_seed(seed, "lda-infer", 10), sweeps);
    std::vector<double> t30 = infer_topics(tm30, tokens, derive_seed(seed, "lda-infer", 30), sweeps);
    out.insert(out.end(), t30.begin(), t30.end());
    return out;
}

}  // namespace sas
