#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sas/base_learners.hpp"
#include "sas/corpus.hpp"
#include "sas/feature_config.hpp"
#include "sas/lda.hpp"
#include "sas/ngram_lm.hpp"
#include "sas/shallow.hpp"
#include "sas/similarity.hpp"
#include "sas/wordlist.hpp"

namespace sas {

struct StackerOptions {
    int top_folds = 5;  // hyperparameter CV at the top level
    int oof_folds = kStackingFolds;
    int lda_iterations = 1000;
    int lda_infer_sweeps = 100;
    size_t knn_k = 8;
    int lexicon_min_count = 3;  // train tokens this frequent join the spelling lexicon
    // per-kind grid overrides; empty slot = default_grid(kind)
    std::array<std::vector<HyperParams>, 5> grids;

    std::vector<HyperParams> grid_for(RegressorKind kind) const {
        const auto& g = grids[static_cast<size_t>(kind)];
        return g.empty() ? default_grid(kind) : g;
    }
};

struct ScorePrediction {
    long long response_id = 0;
    double unrounded = 0.0;
    int final_score = 0;
};

inline int finalize_score(double unrounded, int score_min, int score_max) {
    double clamped = std::min(std::max(unrounded, static_cast<double>(score_min)),
                              static_cast<double>(score_max));
    return static_cast<int>(std::round(clamped));  // halves away from zero
}

// Fully fitted per-question model: bag learners, auxiliary models, and the
// five top-level regressors. Immutable after fitting; prediction is const.
struct QuestionModel {
    int question_id = 0;
    FeatureConfig config = FeatureConfig::Base;
    int score_min = 0;
    int score_max = 0;
    uint64_t seed = 0;
    bool degenerate_gold = false;

    std::vector<std::string> feature_names;
    std::vector<BaseLearner> bag_learners;  // BOW [+ ngrams] [+ deps], inventory order

    bool has_lda = false;
    TopicModel lda10, lda30;
    bool has_lms = false;
    NgramLM lm_top, lm_toptwo, lm_zero;
    bool has_knn = false;
    std::vector<long long> pool_ids;
    std::vector<std::vector<std::string>> pool_tokens;
    std::vector<int> pool_gold;
    WordLexicon wf_lexicon;

    std::vector<FittedRegressor> top_models;  // kAllRegressorKinds order

    int lda_infer_sweeps = 100;
    size_t knn_k = 8;

    // rebuilt after deserialization
    struct Caches {
        std::vector<std::unordered_map<std::string, int>> bag_index;
        std::vector<BleuStats> pool_stats;
    };
    mutable std::shared_ptr<const Caches> caches;

    void rebuild_caches() const {
        auto c = std::make_shared<Caches>();
        c->bag_index.reserve(bag_learners.size());
        for (const auto& bl : bag_learners) c->bag_index.push_back(bl.vocab.index());
        c->pool_stats.reserve(pool_tokens.size());
        for (const auto& toks : pool_tokens) {
            TokenSequence seq;
            seq.tokens = toks;
            c->pool_stats.push_back(make_bleu_stats(seq));
        }
        caches = std::move(c);
    }

    UnitCounts units_for(const BagSpec& spec, const TokenSequence& tokens, const std::string& text,
                         const DependencyAnnotation* dep) const {
        if (spec.is_dependency) return dependency_units(dep, spec.dep_variant, tokens);
        return extract_units(tokens, text, spec.unit_kind);
    }

    double apply_bag(size_t b, const TokenSequence& tokens, const std::string& text,
                     const DependencyAnnotation* dep) const {
        const auto& bl = bag_learners[b];
        UnitCounts units = units_for(bl.spec, tokens, text, dep);
        std::vector<double> row = vectorize(caches->bag_index[b], bl.vocab.size(), units);
        return bl.model.predict_row(row.data());
    }

    // Apply-mode feature vector: full-fit bag predictions plus the static
    // feature blocks, in the same order as the training matrix.
    std::vector<double> assemble_apply(const Response& r, const DependencyAnnotation* dep) const {
        if (!caches) rebuild_caches();
        const TokenSequence tokens = tokenize(r.text);
        std::vector<double> fv;
        fv.reserve(feature_names.size());
        size_t next_bag = 0;
        const size_t n_bow = 5;
        for (size_t b = 0; b < n_bow; ++b) fv.push_back(apply_bag(next_bag++, tokens, r.text, dep));
        if (has_lda) {
            auto topics = topic_features(lda10, lda30, tokens.tokens,
                                         derive_seed(seed, "topics", static_cast<uint64_t>(r.response_id)),
                                         lda_infer_sweeps);
            fv.insert(fv.end(), topics.begin(), topics.end());
            auto wf = wellformedness_features(tokens, r.text, wf_lexicon).as_features();
            fv.insert(fv.end(), wf.begin(), wf.end());
            auto len = length_features(tokens, r.text);
            fv.insert(fv.end(), len.begin(), len.end());
        }
        if (config_has_ngrams(config))
            for (size_t k = 0; k < 3; ++k) fv.push_back(apply_bag(next_bag++, tokens, r.text, dep));
        if (has_lms) {
            fv.push_back(lm_perplexity(lm_top, tokens));
            fv.push_back(lm_perplexity(lm_toptwo, tokens));
            fv.push_back(lm_perplexity(lm_zero, tokens));
        }
        if (config_has_deps(config))
            for (size_t k = 0; k < 6; ++k) fv.push_back(apply_bag(next_bag++, tokens, r.text, dep));
        if (has_knn) {
            std::vector<PoolEntry> pool;
            pool.reserve(pool_ids.size());
            for (size_t i = 0; i < pool_ids.size(); ++i) {
                if (pool_ids[i] == r.response_id) continue;  // never match itself
                pool.push_back({pool_ids[i], &caches->pool_stats[i], pool_gold[i]});
            }
            KnnFeatures kf = knn_features(make_bleu_stats(tokens), pool, knn_k);
            fv.push_back(kf.mean_score);
            fv.push_back(kf.weighted_mean_score);
        }
        if (config_has_segments(config)) {
            auto seg = discourse_features(segment_discourse(r.text));
            fv.insert(fv.end(), seg.begin(), seg.end());
        }
        return fv;
    }

    std::array<double, 5> predict_all_kinds(const std::vector<double>& fv) const {
        std::array<double, 5> out{};
        for (size_t k = 0; k < top_models.size(); ++k) out[k] = top_models[k].predict_row(fv.data());
        return out;
    }

    ScorePrediction predict_ensemble(const Response& r, const DependencyAnnotation* dep = nullptr) const {
        const std::vector<double> fv = assemble_apply(r, dep);
        const auto all = predict_all_kinds(fv);
        double mean = 0.0;
        for (double v : all) mean += v;
        mean /= static_cast<double>(all.size());
        return {r.response_id, mean, finalize_score(mean, score_min, score_max)};
    }

    ScorePrediction predict_single(const Response& r, RegressorKind kind,
                                   const DependencyAnnotation* dep = nullptr) const {
        const std::vector<double> fv = assemble_apply(r, dep);
        const double v = top_models[static_cast<size_t>(kind)].predict_row(fv.data());
        return {r.response_id, v, finalize_score(v, score_min, score_max)};
    }
};

// Everything fitted on one question's train split, before top-level modeling.
// Shared across feature configurations during ablation: per-learner seeds
// depend only on (seed, learner label, data), so results match per-config
// refits exactly.
struct SubModelSet {
    int question_id = 0;
    int score_min = 0;
    int score_max = 0;
    uint64_t seed = 0;
    FeatureConfig fitted_for = FeatureConfig::Base;
    StackerOptions options;

    std::vector<const Response*> train;
    std::vector<TokenSequence> train_tokens;
    std::vector<int> gold;
    bool degenerate_gold = false;

    std::vector<BaseLearnerFit> bag_fits;
    std::unordered_map<std::string, size_t> bag_by_label;

    bool has_lda = false;
    TopicModel lda10, lda30;
    bool has_lms = false;
    NgramLM lm_top, lm_toptwo, lm_zero;
    WordLexicon wf_lexicon;
    bool has_knn = false;
    std::vector<BleuStats> train_bleu;

    // static per-train-row feature blocks
    std::vector<std::vector<double>> lda_block;
    std::vector<std::array<double, 5>> wf_block;
    std::vector<std::array<double, 3>> len_block;
    std::vector<std::array<double, 3>> lm_block;
    std::vector<std::array<double, 2>> knn_block;
    std::vector<std::array<double, 5>> seg_block;
};

inline std::vector<std::string> feature_names_for(FeatureConfig config) {
    std::vector<std::string> names;
    for (const auto& spec : bow_family()) names.push_back(spec.label);
    if (config_has_base(config)) {
        for (int t = 0; t < 10; ++t) names.push_back("lda10_" + std::to_string(t));
        for (int t = 0; t < 30; ++t) names.push_back("lda30_" + std::to_string(t));
        names.insert(names.end(), {"wf_misspell", "wf_duplicate", "wf_lowercase_start",
                                   "wf_punct", "wf_total"});
        names.insert(names.end(), {"len_chars", "len_words", "len_sentences"});
    }
    if (config_has_ngrams(config))
        for (const auto& spec : ngram_family()) names.push_back(spec.label);
    if (config_has_lm(config))
        names.insert(names.end(), {"lm_top_ppl", "lm_toptwo_ppl", "lm_zero_ppl"});
    if (config_has_deps(config))
        for (const auto& spec : dep_family()) names.push_back(spec.label);
    if (config_has_knn(config)) names.insert(names.end(), {"knn_mean", "knn_weighted_mean"});
    if (config_has_segments(config))
        names.insert(names.end(), {"seg_unit_count", "seg_numbered_len", "seg_max_number",
                                   "seg_finally", "seg_furthermore"});
    return names;
}

inline SubModelSet fit_sub_models(const Dataset& ds, int qid, FeatureConfig config, uint64_t seed,
                                  const DependencyMap* deps, const StackerOptions& opt = {}) {
    const QuestionSpec& q = ds.question(qid);
    SubModelSet sub;
    sub.question_id = qid;
    sub.score_min = q.score_min;
    sub.score_max = q.score_max;
    sub.seed = seed;
    sub.fitted_for = config;
    sub.options = opt;
    sub.train = ds.select(qid, Partition::Train);
    if (sub.train.empty())
        throw std::invalid_argument("question " + std::to_string(qid) + ": empty train partition");
    if (config_has_deps(config) && deps == nullptr)
        throw std::invalid_argument("question " + std::to_string(qid) +
                                    ": config requires a dependency annotation file");

    const size_t n = sub.train.size();
    sub.train_tokens.reserve(n);
    sub.gold.reserve(n);
    for (const Response* r : sub.train) {
        sub.train_tokens.push_back(tokenize(r->text));
        sub.gold.push_back(gold_score(*r));
    }
    sub.degenerate_gold = true;
    for (size_t i = 1; i < n && sub.degenerate_gold; ++i)
        sub.degenerate_gold = sub.gold[i] == sub.gold[0];

    auto dep_of = [&](long long rid) -> const DependencyAnnotation* {
        if (!deps) return nullptr;
        auto it = deps->find(rid);
        return it == deps->end() ? nullptr : &it->second;
    };

    for (const BagSpec& spec : base_feature_inventory(config)) {
        std::vector<TrainRow> rows(n);
        for (size_t i = 0; i < n; ++i) {
            rows[i].response_id = sub.train[i]->response_id;
            rows[i].gold = sub.gold[i];
            if (spec.is_dependency)
                rows[i].units = dependency_units(dep_of(rows[i].response_id), spec.dep_variant,
                                                 sub.train_tokens[i]);
            else
                rows[i].units = extract_units(sub.train_tokens[i], sub.train[i]->text, spec.unit_kind);
        }
        sub.bag_by_label[spec.label] = sub.bag_fits.size();
        sub.bag_fits.push_back(fit_base_learner(rows, spec, seed, opt.oof_folds));
    }

    if (config_has_base(config)) {
        sub.has_lda = true;
        std::vector<std::vector<std::string>> docs;
        docs.reserve(n);
        for (const auto& t : sub.train_tokens) docs.push_back(t.tokens);
        sub.lda10 = fit_lda(docs, 10, derive_seed(seed, "lda", 10), opt.lda_iterations);
        sub.lda30 = fit_lda(docs, 30, derive_seed(seed, "lda", 30), opt.lda_iterations);

        sub.wf_lexicon = bundled_word_lexicon();
        std::unordered_map<std::string, int> freq;
        for (const auto& t : sub.train_tokens)
            for (const auto& w : t.tokens) ++freq[w];
        for (const auto& [w, c] : freq)
            if (c >= opt.lexicon_min_count) sub.wf_lexicon.insert(w);

        sub.lda_block.resize(n);
        sub.wf_block.resize(n);
        sub.len_block.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const Response& r = *sub.train[i];
            sub.lda_block[i] =
                topic_features(sub.lda10, sub.lda30, sub.train_tokens[i].tokens,
                               derive_seed(seed, "topics", static_cast<uint64_t>(r.response_id)),
                               opt.lda_infer_sweeps);
            sub.wf_block[i] =
                wellformedness_features(sub.train_tokens[i], r.text, sub.wf_lexicon).as_features();
            sub.len_block[i] = length_features(sub.train_tokens[i], r.text);
        }
    }

    if (config_has_lm(config)) {
        sub.has_lms = true;
        std::vector<const TokenSequence*> seqs;
        seqs.reserve(n);
        for (const auto& t : sub.train_tokens) seqs.push_back(&t);
        sub.lm_top = fit_lm(seqs, sub.gold, sub.score_min, sub.score_max, LmSubset::TopScore);
        sub.lm_toptwo = fit_lm(seqs, sub.gold, sub.score_min, sub.score_max, LmSubset::TopTwoScores);
        sub.lm_zero = fit_lm(seqs, sub.gold, sub.score_min, sub.score_max, LmSubset::ZeroScore);
        sub.lm_block.resize(n);
        for (size_t i = 0; i < n; ++i)
            sub.lm_block[i] = {lm_perplexity(sub.lm_top, sub.train_tokens[i]),
                               lm_perplexity(sub.lm_toptwo, sub.train_tokens[i]),
                               lm_perplexity(sub.lm_zero, sub.train_tokens[i])};
    }

    if (config_has_knn(config)) {
        sub.has_knn = true;
        sub.train_bleu.reserve(n);
        for (const auto& t : sub.train_tokens) sub.train_bleu.push_back(make_bleu_stats(t));
        sub.knn_block.resize(n);
        for (size_t i = 0; i < n; ++i) {
            std::vector<PoolEntry> pool;
            pool.reserve(n - 1);
            for (size_t j = 0; j < n; ++j) {
                if (j == i) continue;  // a train query never sees itself
                pool.push_back({sub.train[j]->response_id, &sub.train_bleu[j], sub.gold[j]});
            }
            KnnFeatures kf = knn_features(sub.train_bleu[i], pool, opt.knn_k);
            sub.knn_block[i] = {kf.mean_score, kf.weighted_mean_score};
        }
    }

    if (config_has_segments(config)) {
        sub.seg_block.resize(n);
        for (size_t i = 0; i < n; ++i)
            sub.seg_block[i] = discourse_features(segment_discourse(sub.train[i]->text));
    }
    return sub;
}

struct TrainDiagnostics {
    std::unordered_map<std::string, std::unordered_map<long long, double>> oof;  // label -> rid -> value
    std::unordered_map<std::string, std::vector<int>> fold_of;                   // label -> fold per row
    std::array<SelectionResult, 5> selection;
    std::vector<std::string> feature_names;
};

struct QuestionFit {
    QuestionModel model;
    TrainDiagnostics diagnostics;
};

// Assembles the out-of-fold train matrix for `config` and fits the five
// top-level regressors with cross-validated hyperparameters. Requires
// fit_sub_models to have covered every family `config` needs.
inline QuestionFit fit_top_level(const SubModelSet& sub, FeatureConfig config) {
    const StackerOptions& opt = sub.options;
    for (const BagSpec& spec : base_feature_inventory(config))
        if (!sub.bag_by_label.count(spec.label))
            throw std::invalid_argument("sub-models missing bag learner " + spec.label);
    if (config_has_base(config) && !sub.has_lda)
        throw std::invalid_argument("sub-models missing topic models");
    if (config_has_lm(config) && !sub.has_lms)
        throw std::invalid_argument("sub-models missing language models");
    if (config_has_knn(config) && !sub.has_knn)
        throw std::invalid_argument("sub-models missing similarity pool");
    if (config_has_segments(config) && sub.seg_block.size() != sub.train.size())
        throw std::invalid_argument("sub-models missing segment features");

    QuestionFit qf;
    QuestionModel& qm = qf.model;
    qm.question_id = sub.question_id;
    qm.config = config;
    qm.score_min = sub.score_min;
    qm.score_max = sub.score_max;
    qm.seed = sub.seed;
    qm.degenerate_gold = sub.degenerate_gold;
    qm.feature_names = feature_names_for(config);
    qm.lda_infer_sweeps = opt.lda_infer_sweeps;
    qm.knn_k = opt.knn_k;
    qf.diagnostics.feature_names = qm.feature_names;

    const size_t n = sub.train.size();
    const std::vector<BagSpec> specs = base_feature_inventory(config);
    std::vector<const BaseLearnerFit*> fits;
    for (const auto& spec : specs) {
        const BaseLearnerFit& f = sub.bag_fits[sub.bag_by_label.at(spec.label)];
        fits.push_back(&f);
        qm.bag_learners.push_back(f.learner);
        qf.diagnostics.oof[spec.label] = f.oof;
        qf.diagnostics.fold_of[spec.label] = f.fold_of;
    }
    const size_t n_bow = bow_family().size();

    DMatrix X(n, qm.feature_names.size());
    for (size_t i = 0; i < n; ++i) {
        const long long rid = sub.train[i]->response_id;
        std::vector<double> fv;
        fv.reserve(X.cols);
        for (size_t b = 0; b < n_bow; ++b) fv.push_back(fits[b]->oof.at(rid));
        if (config_has_base(config)) {
            fv.insert(fv.end(), sub.lda_block[i].begin(), sub.lda_block[i].end());
            fv.insert(fv.end(), sub.wf_block[i].begin(), sub.wf_block[i].end());
            fv.insert(fv.end(), sub.len_block[i].begin(), sub.len_block[i].end());
        }
        size_t next_bag = n_bow;
        if (config_has_ngrams(config))
            for (size_t k = 0; k < ngram_family().size(); ++k)
                fv.push_back(fits[next_bag + k]->oof.at(rid));
        if (config_has_ngrams(config)) next_bag += ngram_family().size();
        if (config_has_lm(config))
            fv.insert(fv.end(), sub.lm_block[i].begin(), sub.lm_block[i].end());
        if (config_has_deps(config))
            for (size_t k = 0; k < dep_family().size(); ++k)
                fv.push_back(fits[next_bag + k]->oof.at(rid));
        if (config_has_knn(config))
            fv.insert(fv.end(), sub.knn_block[i].begin(), sub.knn_block[i].end());
        if (config_has_segments(config))
            fv.insert(fv.end(), sub.seg_block[i].begin(), sub.seg_block[i].end());
        if (fv.size() != X.cols)
            throw std::logic_error("feature assembly size mismatch");
        std::copy(fv.begin(), fv.end(), X.row(i));
    }

    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) y[i] = static_cast<double>(sub.gold[i]);

    for (RegressorKind kind : kAllRegressorKinds) {
        const size_t ki = static_cast<size_t>(kind);
        const auto grid = opt.grid_for(kind);
        SelectionResult sel = select_hyperparams(kind, X, y, grid, opt.top_folds,
                                                 derive_seed(sub.seed, "top-select", ki));
        qf.diagnostics.selection[ki] = sel;
        qm.top_models.push_back(fit(kind, X, y, sel.best, derive_seed(sub.seed, "top-fit", ki)));
    }

    if (config_has_base(config)) {
        qm.has_lda = true;
        qm.lda10 = sub.lda10;
        qm.lda30 = sub.lda30;
        qm.wf_lexicon = sub.wf_lexicon;
    }
    if (config_has_lm(config)) {
        qm.has_lms = true;
        qm.lm_top = sub.lm_top;
        qm.lm_toptwo = sub.lm_toptwo;
        qm.lm_zero = sub.lm_zero;
    }
    if (config_has_knn(config)) {
        qm.has_knn = true;
        for (size_t i = 0; i < n; ++i) {
            qm.pool_ids.push_back(sub.train[i]->response_id);
            qm.pool_tokens.push_back(sub.train_tokens[i].tokens);
            qm.pool_gold.push_back(sub.gold[i]);
        }
    }
    qm.rebuild_caches();
    return qf;
}

inline QuestionFit fit_question_model(const Dataset& ds, int qid, FeatureConfig config,
                                      uint64_t seed, const DependencyMap* deps = nullptr,
                                      const StackerOptions& opt = {}) {
    SubModelSet sub = fit_sub_models(ds, qid, config, seed, deps, opt);
    return fit_top_level(sub, config);
}

}  // namespace sas
