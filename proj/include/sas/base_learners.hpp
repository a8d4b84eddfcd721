#pragma once

#include <array>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sas/corpus.hpp"
#include "sas/feature_config.hpp"
#include "sas/regressors.hpp"
#include "sas/textproc.hpp"

namespace sas {

enum class DepVariant { DepsOnly, DepsPlusWords, DepsPlusPartial };

struct BagSpec {
    std::string label;  // feature name, unique within a configuration
    UnitKind unit_kind;
    bool is_dependency = false;
    DepVariant dep_variant = DepVariant::DepsOnly;
    RegressorKind learner = RegressorKind::RandomForest;
};

struct DependencyTriple {
    std::string relation;
    std::string head;
    std::string dependent;
};

struct DependencyAnnotation {
    long long response_id = 0;
    std::vector<DependencyTriple> triples;
};

using DependencyMap = std::unordered_map<long long, DependencyAnnotation>;

// TSV of ResponseId / Relation / Head / Dependent, one triple per line, no
// header. Ids missing from the dataset are reported as warnings, not errors.
inline DependencyMap load_dependencies(const std::string& path, const Dataset* dataset = nullptr,
                                       std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");
    DependencyMap out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_view(line).empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != 4)
            throw ParseError(path, lineno, "expected 4 columns, got " + std::to_string(f.size()));
        long long rid;
        if (!parse_int(f[0], rid)) throw ParseError(path, lineno, "bad ResponseId: " + f[0]);
        if (f[1].empty() || f[2].empty() || f[3].empty())
            throw ParseError(path, lineno, "empty triple field");
        if (dataset && !dataset->has_response(rid) && warnings)
            warnings->push_back(path + ":" + std::to_string(lineno) +
                                ": response id " + std::to_string(rid) + " not in dataset");
        auto& ann = out[rid];
        ann.response_id = rid;
        ann.triples.push_back({f[1], f[2], f[3]});
    }
    return out;
}

// DepsOnly: rel(head,dep). DepsPlusWords adds word unigrams. DepsPlusPartial
// adds rel(head,*) and rel(*,dep).
inline UnitCounts dependency_units(const DependencyAnnotation* ann, DepVariant variant,
                                   const TokenSequence& tokens) {
    UnitCounts out;
    if (ann) {
        for (const auto& t : ann->triples) {
            ++out[t.relation + "(" + t.head + "," + t.dependent + ")"];
            if (variant == DepVariant::DepsPlusPartial) {
                ++out[t.relation + "(" + t.head + ",*)"];
                ++out[t.relation + "(*," + t.dependent + ")"];
            }
        }
    }
    if (variant == DepVariant::DepsPlusWords)
        for (const auto& w : tokens.tokens) ++out[w];
    return out;
}

// BOW family: word RF, two char-ngram RF (n=3, n=4), stem RF, stem SVR.
inline std::vector<BagSpec> bow_family() {
    return {
        {"bow_word_rf", UnitKind::word(), false, DepVariant::DepsOnly, RegressorKind::RandomForest},
        {"bow_char3_rf", UnitKind::char_ngram(3), false, DepVariant::DepsOnly, RegressorKind::RandomForest},
        {"bow_char4_rf", UnitKind::char_ngram(4), false, DepVariant::DepsOnly, RegressorKind::RandomForest},
        {"bow_stem_rf", UnitKind::stem(), false, DepVariant::DepsOnly, RegressorKind::RandomForest},
        {"bow_stem_svr", UnitKind::stem(), false, DepVariant::DepsOnly, RegressorKind::SvrRbf},
    };
}

// Pooled 1..3-gram vocabulary with three learners.
inline std::vector<BagSpec> ngram_family() {
    return {
        {"ngram13_rf", UnitKind::pooled_word_ngram(1, 3), false, DepVariant::DepsOnly, RegressorKind::RandomForest},
        {"ngram13_svr", UnitKind::pooled_word_ngram(1, 3), false, DepVariant::DepsOnly, RegressorKind::SvrRbf},
        {"ngram13_ridge", UnitKind::pooled_word_ngram(1, 3), false, DepVariant::DepsOnly, RegressorKind::Ridge},
    };
}

// Three dependency variants, each with RF and SVR.
inline std::vector<BagSpec> dep_family() {
    std::vector<BagSpec> out;
    const std::pair<DepVariant, const char*> variants[] = {
        {DepVariant::DepsOnly, "dep_only"},
        {DepVariant::DepsPlusWords, "dep_words"},
        {DepVariant::DepsPlusPartial, "dep_partial"},
    };
    for (const auto& [variant, name] : variants) {
        out.push_back({std::string(name) + "_rf", UnitKind{UnitKind::Family::DepTriple, 1, 1}, true,
                       variant, RegressorKind::RandomForest});
        out.push_back({std::string(name) + "_svr", UnitKind{UnitKind::Family::DepTriple, 1, 1}, true,
                       variant, RegressorKind::SvrRbf});
    }
    return out;
}

inline std::vector<BagSpec> base_feature_inventory(FeatureConfig config) {
    std::vector<BagSpec> out = bow_family();
    if (config_has_ngrams(config)) {
        auto extra = ngram_family();
        out.insert(out.end(), extra.begin(), extra.end());
    }
    if (config_has_deps(config)) {
        auto extra = dep_family();
        out.insert(out.end(), extra.begin(), extra.end());
    }
    return out;
}

inline constexpr int kVocabTopK = 1000;
inline constexpr int kStackingFolds = 5;

// Bag learners use fixed hyperparameters (no per-learner grid search); the
// cross-validated search happens at the top level only.
inline HyperParams base_learner_hyperparams(const BagSpec& spec, size_t vocab_size) {
    HyperParams hp;
    hp.rf_trees = 200;
    hp.rf_max_depth = 25;
    hp.rf_min_leaf = 5;
    hp.rf_feature_fraction = 0.3;
    hp.svr_c = 10.0;
    hp.svr_epsilon = 0.1;
    hp.svr_gamma = vocab_size > 0 ? 1.0 / static_cast<double>(vocab_size) : 1.0;
    hp.ridge_lambda = 1.0;
    (void)spec;
    return hp;
}

struct BaseLearner {
    BagSpec spec;
    Vocabulary vocab;
    FittedRegressor model;
    bool degenerate = false;  // constant gold in training
};

struct TrainRow {
    long long response_id = 0;
    int gold = 0;
    UnitCounts units;
};

struct BaseLearnerFit {
    BaseLearner learner;
    std::unordered_map<long long, double> oof;  // out-of-fold prediction per train response
    std::vector<int> fold_of;                   // leakage bookkeeping, aligned with input rows
};

// Deterministic stratified assignment: shuffle within each gold-score group,
// then deal round-robin.
inline std::vector<int> stratified_folds(const std::vector<int>& gold, int folds, uint64_t seed) {
    std::unordered_map<int, std::vector<size_t>> groups;
    std::vector<int> keys;
    for (size_t i = 0; i < gold.size(); ++i) {
        if (!groups.count(gold[i])) keys.push_back(gold[i]);
        groups[gold[i]].push_back(i);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<int> fold(gold.size(), 0);
    int cursor = 0;
    for (int key : keys) {
        auto& idx = groups[key];
        Rng rng(derive_seed(seed, "stratify", static_cast<uint64_t>(key)));
        rng.shuffle(idx);
        for (size_t i : idx) fold[i] = cursor++ % folds;
    }
    return fold;
}

// Builds the vocabulary on the full train split, computes out-of-fold
// predictions from k-1 fold fits, then refits on everything.
inline BaseLearnerFit fit_base_learner(const std::vector<TrainRow>& train, const BagSpec& spec,
                                       uint64_t seed, int folds = kStackingFolds) {
    if (train.size() < 2 * static_cast<size_t>(folds))
        throw std::invalid_argument("fit_base_learner: need at least 2*folds training responses");

    BaseLearnerFit result;
    result.learner.spec = spec;

    std::vector<UnitCounts> all_units;
    all_units.reserve(train.size());
    for (const auto& row : train) all_units.push_back(row.units);
    result.learner.vocab = build_vocab(all_units, spec.unit_kind, kVocabTopK);
    const auto vocab_index = result.learner.vocab.index();
    const size_t v = result.learner.vocab.size();

    DMatrix X(train.size(), v);
    std::vector<double> y(train.size());
    std::vector<int> gold(train.size());
    for (size_t i = 0; i < train.size(); ++i) {
        std::vector<double> row = vectorize(vocab_index, v, train[i].units);
        std::copy(row.begin(), row.end(), X.row(i));
        y[i] = static_cast<double>(train[i].gold);
        gold[i] = train[i].gold;
    }

    bool constant = true;
    for (size_t i = 1; i < gold.size() && constant; ++i) constant = gold[i] == gold[0];
    result.learner.degenerate = constant;

    const HyperParams hp = base_learner_hyperparams(spec, v);
    result.fold_of = stratified_folds(gold, folds, derive_seed(seed, "oof", fnv1a64(spec.label)));

    for (int f = 0; f < folds; ++f) {
        std::vector<size_t> tr, te;
        for (size_t i = 0; i < train.size(); ++i) (result.fold_of[i] == f ? te : tr).push_back(i);
        if (te.empty()) continue;
        DMatrix Xtr(tr.size(), v);
        std::vector<double> ytr(tr.size());
        for (size_t i = 0; i < tr.size(); ++i) {
            std::copy(X.row(tr[i]), X.row(tr[i]) + v, Xtr.row(i));
            ytr[i] = y[tr[i]];
        }
        FittedRegressor m = fit(spec.learner, Xtr, ytr, hp,
                                derive_seed(seed, "oof-fit", fnv1a64(spec.label) + f));
        for (size_t i : te) result.oof[train[i].response_id] = m.predict_row(X.row(i));
    }

    result.learner.model =
        fit(spec.learner, X, y, hp, derive_seed(seed, "full-fit", fnv1a64(spec.label)));
    return result;
}

inline double apply_base_learner(const BaseLearner& bl, const UnitCounts& units) {
    const auto idx = bl.vocab.index();
    std::vector<double> row = vectorize(idx, bl.vocab.size(), units);
    return bl.model.predict_row(row.data());
}

}  // namespace sas
