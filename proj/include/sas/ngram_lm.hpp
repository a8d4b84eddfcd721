#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sas/textproc.hpp"

namespace sas {

enum class LmSubset { TopScore, TopTwoScores, ZeroScore };

inline const char* lm_subset_name(LmSubset s) {
    switch (s) {
        case LmSubset::TopScore: return "top";
        case LmSubset::TopTwoScores: return "toptwo";
        case LmSubset::ZeroScore: return "zero";
    }
    return "?";
}

// Interpolated Witten-Bell n-gram model over per-sentence padded streams.
// Events are real tokens plus one end marker per sentence; the event space is
// the training vocabulary plus a single OOV class.
class NgramLM {
   public:
    static constexpr const char* kBegin = "<s>";
    static constexpr const char* kEnd = "</s>";

    int order = 3;
    LmSubset subset = LmSubset::TopScore;
    bool degenerate = false;

    struct ContextStats {
        long long total = 0;
        std::unordered_map<std::string, long long> continuations;
    };

    // tables[k] holds order-(k+1) contexts (k preceding items joined by \x1f)
    std::vector<std::unordered_map<std::string, ContextStats>> tables;
    std::unordered_set<std::string> vocab;  // predicted event types, kEnd included

    size_t event_classes() const { return vocab.size() + 1; }  // + OOV

    void count_sentence(const std::vector<std::string>& tokens) {
        std::vector<std::string> stream;
        stream.reserve(tokens.size() + order);
        for (int i = 0; i < order - 1; ++i) stream.push_back(kBegin);
        stream.insert(stream.end(), tokens.begin(), tokens.end());
        stream.push_back(kEnd);
        for (size_t pos = order - 1; pos < stream.size(); ++pos) {
            const std::string& w = stream[pos];
            vocab.insert(w);
            for (int k = 0; k < order; ++k) {
                std::string ctx;
                for (int b = k; b >= 1; --b) {
                    ctx += stream[pos - b];
                    if (b > 1) ctx += '\x1f';
                }
                ContextStats& st = tables[k][ctx];
                st.total += 1;
                st.continuations[w] += 1;
            }
        }
    }

    // P(w | context), interpolating down to uniform over vocab + OOV.
    double prob(const std::string& w, const std::vector<std::string>& context) const {
        double p = 1.0 / static_cast<double>(event_classes());
        if (degenerate) return p;
        for (int k = 0; k < order; ++k) {
            std::string ctx;
            if (k > 0) {
                const size_t have = context.size();
                for (int b = k; b >= 1; --b) {
                    ctx += static_cast<size_t>(b) <= have ? context[have - b] : kBegin;
                    if (b > 1) ctx += '\x1f';
                }
            }
            auto it = tables[k].find(ctx);
            if (it == tables[k].end() || it->second.total == 0) continue;
            const ContextStats& st = it->second;
            const double T = static_cast<double>(st.continuations.size());
            auto cit = st.continuations.find(w);
            const double c = cit == st.continuations.end() ? 0.0 : static_cast<double>(cit->second);
            p = (c + T * p) / (static_cast<double>(st.total) + T);
        }
        return p;
    }

    // Sum of log P over the padded sentence, and the number of scored events.
    void score_sentence(const std::vector<std::string>& tokens, double& log_sum,
                        size_t& events) const {
        std::vector<std::string> context(order - 1, kBegin);
        auto score = [&](const std::string& w) {
            log_sum += std::log(prob(w, context));
            ++events;
            context.push_back(w);
        };
        for (const auto& t : tokens) score(t);
        score(kEnd);
    }
};

// Selects the tagged score band from the train split and fits the model.
// An empty band yields a degenerate uniform model over the full train
// vocabulary plus OOV.
inline NgramLM fit_lm(const std::vector<const TokenSequence*>& train_tokens,
                      const std::vector<int>& gold, int score_min, int score_max, LmSubset subset,
                      int order = 3) {
    if (train_tokens.size() != gold.size()) throw std::invalid_argument("fit_lm: size mismatch");
    NgramLM lm;
    lm.order = order;
    lm.subset = subset;
    lm.tables.resize(order);
    auto selected = [&](int g) {
        switch (subset) {
            case LmSubset::TopScore: return g == score_max;
            case LmSubset::TopTwoScores: return g >= score_max - 1;
            case LmSubset::ZeroScore: return g == 0;
        }
        return false;
    };
    size_t used = 0;
    for (size_t i = 0; i < train_tokens.size(); ++i) {
        if (!selected(gold[i])) continue;
        ++used;
        const TokenSequence& seq = *train_tokens[i];
        if (seq.tokens.empty()) {
            lm.count_sentence({});
            continue;
        }
        for (size_t s = 0; s < seq.sentence_count(); ++s) {
            auto [b, e] = seq.sentence(s);
            lm.count_sentence(std::vector<std::string>(seq.tokens.begin() + b, seq.tokens.begin() + e));
        }
    }
    if (used == 0) {
        lm.degenerate = true;
        lm.tables.clear();
        for (const auto* seq : train_tokens)
            for (const auto& t : seq->tokens) lm.vocab.insert(t);
        lm.vocab.insert(NgramLM::kEnd);
    }
    return lm;
}

// exp of the mean negative log probability per scored event; each sentence is
// padded and scored independently, and an empty response scores one end
// marker.
inline double lm_perplexity(const NgramLM& lm, const TokenSequence& seq) {
    double log_sum = 0.0;
    size_t events = 0;
    if (seq.tokens.empty()) {
        lm.score_sentence({}, log_sum, events);
    } else {
        for (size_t s = 0; s < seq.sentence_count(); ++s) {
            auto [b, e] = seq.sentence(s);
            lm.score_sentence(std::vector<std::string>(seq.tokens.begin() + b, seq.tokens.begin() + e),
                              log_sum, events);
        }
    }
    return std::exp(-log_sum / static_cast<double>(events));
}

}  // namespace sas
