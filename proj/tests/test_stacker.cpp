#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "sas/metrics.hpp"
#include "sas/stacker.hpp"
#include "support/synthetic.hpp"

using namespace sas;

namespace {

// small option set so unit tests stay fast; acceptance exercises defaults
StackerOptions fast_options() {
    StackerOptions opt;
    opt.lda_iterations = 120;
    opt.lda_infer_sweeps = 30;
    HyperParams rf;
    rf.rf_trees = 40;
    rf.rf_feature_fraction = 0.6;
    HyperParams gb;
    gb.gb_trees = 40;
    gb.gb_max_depth = 2;
    HyperParams ridge;
    ridge.ridge_lambda = 1.0;
    HyperParams svr;
    svr.svr_c = 1.0;
    svr.svr_gamma = 0.1;
    opt.grids[static_cast<size_t>(RegressorKind::RandomForest)] = {rf};
    opt.grids[static_cast<size_t>(RegressorKind::GradientBoosting)] = {gb};
    opt.grids[static_cast<size_t>(RegressorKind::Ridge)] = {ridge};
    opt.grids[static_cast<size_t>(RegressorKind::SvrRbf)] = {svr};
    return opt;
}

}  // namespace

TEST_CASE("feature vector lengths per configuration") {
    CHECK(feature_names_for(FeatureConfig::BowOnly).size() == 5);
    CHECK(feature_names_for(FeatureConfig::Base).size() == 53);
    CHECK(feature_names_for(FeatureConfig::BaseNgrams).size() == 56);
    CHECK(feature_names_for(FeatureConfig::BaseLm).size() == 56);
    CHECK(feature_names_for(FeatureConfig::BaseDeps).size() == 59);
    CHECK(feature_names_for(FeatureConfig::BaseKnnBleu).size() == 55);
    CHECK(feature_names_for(FeatureConfig::BaseSegments).size() == 58);
    CHECK(feature_names_for(FeatureConfig::All).size() == 72);

    for (FeatureConfig c : kAllFeatureConfigs) {
        auto names = feature_names_for(c);
        std::set<std::string> unique(names.begin(), names.end());
        CHECK(unique.size() == names.size());
    }
}

TEST_CASE("finalize_score clamps then rounds half away from zero") {
    CHECK(finalize_score(1.0, 0, 3) == 1);
    CHECK(finalize_score(3.7, 0, 3) == 3);
    CHECK(finalize_score(1.5, 0, 3) == 2);
    CHECK(finalize_score(0.5, 0, 3) == 1);
    CHECK(finalize_score(-2.3, 0, 3) == 0);
    CHECK(finalize_score(2.49999, 0, 3) == 2);
}

TEST_CASE("constant-gold question yields a constant model") {
    Dataset ds = synth::make_keyword_dataset(40, 3);
    for (auto& r : ds.responses) {
        r.score_rater1 = 2;
        r.score_rater2 = 2;
    }
    QuestionFit qf = fit_question_model(ds, 1, FeatureConfig::BowOnly, 11, nullptr, fast_options());
    CHECK(qf.model.degenerate_gold);
    Response probe;
    probe.response_id = 999999;
    probe.question_id = 1;
    probe.text = "Anything at all.";
    ScorePrediction p = qf.model.predict_ensemble(probe);
    CHECK(p.unrounded == Catch::Approx(2.0).margin(1e-6));
    CHECK(p.final_score == 2);
}

TEST_CASE("bow-only pipeline learns the keyword rule end to end") {
    Dataset ds = synth::make_keyword_dataset(120, 21);
    QuestionFit qf = fit_question_model(ds, 1, FeatureConfig::BowOnly, 5, nullptr, fast_options());
    const QuestionModel& qm = qf.model;
    CHECK(qm.feature_names.size() == 5);
    CHECK(qm.bag_learners.size() == 5);
    CHECK(qm.top_models.size() == 5);

    // train-set ensemble agreement with the planted rule
    std::vector<double> unrounded, gold;
    std::vector<int> final_scores, gold_int;
    for (const auto* r : ds.select(1, Partition::Train)) {
        ScorePrediction p = qm.predict_ensemble(*r);
        unrounded.push_back(p.unrounded);
        final_scores.push_back(p.final_score);
        gold.push_back(gold_score(*r));
        gold_int.push_back(gold_score(*r));
        CHECK(p.final_score >= 0);
        CHECK(p.final_score <= 2);
    }
    CHECK(pearson(unrounded, gold) > 0.9);
    CHECK(qwk(gold_int, final_scores, 0, 2) > 0.9);
}

TEST_CASE("ensemble output is the exact mean of the five top models") {
    Dataset ds = synth::make_keyword_dataset(60, 33);
    QuestionFit qf = fit_question_model(ds, 1, FeatureConfig::BowOnly, 2, nullptr, fast_options());
    const QuestionModel& qm = qf.model;
    for (const auto* r : ds.select(1, Partition::Train)) {
        ScorePrediction ens = qm.predict_ensemble(*r);
        double mean = 0.0;
        for (RegressorKind kind : kAllRegressorKinds)
            mean += qm.predict_single(*r, kind).unrounded;
        mean /= 5.0;
        CHECK(ens.unrounded == Catch::Approx(mean).margin(1e-12));
    }
}

TEST_CASE("train matrix uses out-of-fold values, not full-fit values") {
    Dataset ds = synth::make_keyword_dataset(80, 55);
    SubModelSet sub = fit_sub_models(ds, 1, FeatureConfig::BowOnly, 4, nullptr, fast_options());
    QuestionFit qf = fit_top_level(sub, FeatureConfig::BowOnly);

    // diagnostics expose the oof map and fold bookkeeping per learner
    for (const auto& spec : base_feature_inventory(FeatureConfig::BowOnly)) {
        REQUIRE(qf.diagnostics.oof.count(spec.label));
        REQUIRE(qf.diagnostics.fold_of.at(spec.label).size() == sub.train.size());
        const auto& oof = qf.diagnostics.oof.at(spec.label);
        const size_t bag_idx = sub.bag_by_label.at(spec.label);
        const BaseLearner& learner = sub.bag_fits[bag_idx].learner;
        const auto idx = learner.vocab.index();
        int differing = 0;
        for (size_t i = 0; i < sub.train.size(); ++i) {
            UnitCounts units =
                extract_units(sub.train_tokens[i], sub.train[i]->text, spec.unit_kind);
            std::vector<double> vec = vectorize(idx, learner.vocab.size(), units);
            if (std::abs(learner.model.predict_row(vec.data()) -
                         oof.at(sub.train[i]->response_id)) > 1e-12)
                ++differing;
        }
        CHECK(differing > 0);
    }
}

TEST_CASE("same seed reruns produce identical predictions") {
    Dataset ds = synth::make_keyword_dataset(60, 71);
    QuestionFit a = fit_question_model(ds, 1, FeatureConfig::BowOnly, 17, nullptr, fast_options());
    QuestionFit b = fit_question_model(ds, 1, FeatureConfig::BowOnly, 17, nullptr, fast_options());
    for (const auto* r : ds.select(1, Partition::Train)) {
        CHECK(a.model.predict_ensemble(*r).unrounded == b.model.predict_ensemble(*r).unrounded);
    }
}

TEST_CASE("base config carries lda, wellformedness, length blocks") {
    Dataset ds = synth::make_keyword_dataset(60, 91);
    StackerOptions opt = fast_options();
    QuestionFit qf = fit_question_model(ds, 1, FeatureConfig::Base, 23, nullptr, opt);
    const QuestionModel& qm = qf.model;
    CHECK(qm.has_lda);
    CHECK_FALSE(qm.has_lms);
    CHECK_FALSE(qm.has_knn);
    CHECK(qm.feature_names.size() == 53);

    Response probe;
    probe.response_id = 424242;
    probe.question_id = 1;
    probe.text = "Photosynthesis is the key process here.";
    std::vector<double> fv = qm.assemble_apply(probe, nullptr);
    REQUIRE(fv.size() == 53);
    // lda blocks normalized
    double s10 = 0, s30 = 0;
    for (int i = 5; i < 15; ++i) s10 += fv[i];
    for (int i = 15; i < 45; ++i) s30 += fv[i];
    CHECK(s10 == Catch::Approx(1.0).margin(1e-6));
    CHECK(s30 == Catch::Approx(1.0).margin(1e-6));
    // length block: chars, words, sentences
    CHECK(fv[50] == static_cast<double>(probe.text.size()));
    CHECK(fv[51] == 6.0);
    CHECK(fv[52] == 1.0);
}

TEST_CASE("missing dependency annotation behaves as a zero-hit bag") {
    synth::DepDataset dd = synth::make_dependency_dataset(40, 5, 3);
    StackerOptions opt = fast_options();
    opt.oof_folds = 5;
    SubModelSet sub = fit_sub_models(dd.dataset, 1, FeatureConfig::BaseDeps, 7, &dd.deps, opt);
    QuestionFit qf = fit_top_level(sub, FeatureConfig::BaseDeps);
    const QuestionModel& qm = qf.model;

    Response no_ann;
    no_ann.response_id = 777777;
    no_ann.question_id = 1;
    no_ann.text = "the system has many parts and works every day here.";
    // dep-bag features for an unannotated response equal the zero-vector
    // prediction of each dependency learner
    std::vector<double> fv = qm.assemble_apply(no_ann, nullptr);
    REQUIRE(fv.size() == 59);
    for (size_t b = 0; b < qm.bag_learners.size(); ++b) {
        if (!qm.bag_learners[b].spec.is_dependency) continue;
        UnitCounts empty;
        const double zero_pred = apply_base_learner(qm.bag_learners[b], empty);
        // dep bags sit after the 48 base features at offset 53 in BASE_DEPS
        const size_t dep_offset = 53 + (b - 5);
        CHECK(fv[dep_offset] == Catch::Approx(zero_pred).margin(1e-12));
    }
}

TEST_CASE("config requiring deps fails without a dependency map") {
    Dataset ds = synth::make_keyword_dataset(40, 3);
    CHECK_THROWS_AS(fit_question_model(ds, 1, FeatureConfig::BaseDeps, 1, nullptr, fast_options()),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_question_model(ds, 1, FeatureConfig::All, 1, nullptr, fast_options()),
                    std::invalid_argument);
}

TEST_CASE("empty train partition is an error") {
    Dataset ds = synth::make_keyword_dataset(10, 3);
    for (auto& r : ds.responses) r.partition = Partition::Test;
    ds.rebuild_index();
    CHECK_THROWS_AS(fit_question_model(ds, 1, FeatureConfig::BowOnly, 1, nullptr, fast_options()),
                    std::invalid_argument);
}

TEST_CASE("sub-model sharing matches per-config refits") {
    Dataset ds = synth::make_keyword_dataset(70, 123);
    StackerOptions opt = fast_options();

    // fit the union once, carve BASE out of it
    SubModelSet sub = fit_sub_models(ds, 1, FeatureConfig::BaseLm, 31, nullptr, opt);
    QuestionFit shared = fit_top_level(sub, FeatureConfig::Base);
    // fit BASE directly
    QuestionFit direct = fit_question_model(ds, 1, FeatureConfig::Base, 31, nullptr, opt);

    for (const auto* r : ds.select(1, Partition::Train)) {
        CHECK(shared.model.predict_ensemble(*r).unrounded ==
              direct.model.predict_ensemble(*r).unrounded);
    }
}

TEST_CASE("knn pool excludes the query train response") {
    Dataset ds = synth::make_keyword_dataset(40, 17);
    StackerOptions opt = fast_options();
    opt.lda_iterations = 50;
    SubModelSet sub = fit_sub_models(ds, 1, FeatureConfig::BaseKnnBleu, 3, nullptr, opt);
    QuestionFit qf = fit_top_level(sub, FeatureConfig::BaseKnnBleu);
    const QuestionModel& qm = qf.model;

    // for a train response, apply-mode knn must skip the self-match: its
    // knn_mean equals the sub-model train block value computed without self
    const size_t knn_offset = 53;  // base(53) then knn(2) in BASE_KNN_BLEU
    for (size_t i = 0; i < 5; ++i) {
        std::vector<double> fv = qm.assemble_apply(*sub.train[i], nullptr);
        CHECK(fv[knn_offset] == Catch::Approx(sub.knn_block[i][0]).margin(1e-12));
        CHECK(fv[knn_offset + 1] == Catch::Approx(sub.knn_block[i][1]).margin(1e-12));
    }
}
