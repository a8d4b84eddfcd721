// Command-line surface for the short-answer scoring engine: train, predict,
// evaluate, and the feature-ablation harness.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "sas/corpus.hpp"
#include "sas/metrics.hpp"
#include "sas/serialize.hpp"
#include "sas/stacker.hpp"

namespace fs = std::filesystem;
using namespace sas;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct RunConfig {
    std::string responses;
    std::string questions;
    std::string deps;
    std::string out = "sas_out";
    std::string features = "BASE";
    uint64_t seed = 42;
    int folds = 5;
    std::string models = "ensemble";
    std::string eval_partition = "test";

    // optional hyperparameter grid overrides
    std::vector<double> ridge_lambda_grid;
    std::vector<double> svr_c_grid;
    std::vector<double> svr_gamma_grid;
    double svr_epsilon = 0.1;
    int rf_trees = 0;  // 0 = default
    std::vector<double> rf_feature_fraction_grid;
    int rf_max_depth = 0;
    int rf_min_leaf = 0;
    int gb_trees = 0;
    std::vector<int> gb_depth_grid;
    double gb_learning_rate = 0.0;
    double gb_subsample = 0.0;
    int lda_iterations = 0;
    int lda_infer_sweeps = 0;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_csv(s)) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (...) {
            throw std::invalid_argument("config key " + key + ": bad number '" + item + "'");
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& s) {
    std::vector<int> out;
    for (double v : parse_double_list(key, s)) out.push_back(static_cast<int>(v));
    return out;
}

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    long long n = 0;
    if (key == "responses") cfg.responses = value;
    else if (key == "questions") cfg.questions = value;
    else if (key == "deps") cfg.deps = value;
    else if (key == "out") cfg.out = value;
    else if (key == "features") cfg.features = value;
    else if (key == "models") cfg.models = value;
    else if (key == "eval_partition") cfg.eval_partition = value;
    else if (key == "seed") {
        if (!parse_int(value, n) || n < 0) throw std::invalid_argument("config: bad seed " + value);
        cfg.seed = static_cast<uint64_t>(n);
    } else if (key == "folds") {
        if (!parse_int(value, n) || n < 2) throw std::invalid_argument("config: bad folds " + value);
        cfg.folds = static_cast<int>(n);
    } else if (key == "ridge_lambda_grid") cfg.ridge_lambda_grid = parse_double_list(key, value);
    else if (key == "svr_c_grid") cfg.svr_c_grid = parse_double_list(key, value);
    else if (key == "svr_gamma_grid") cfg.svr_gamma_grid = parse_double_list(key, value);
    else if (key == "svr_epsilon") cfg.svr_epsilon = parse_double_list(key, value).at(0);
    else if (key == "rf_trees") cfg.rf_trees = parse_int_list(key, value).at(0);
    else if (key == "rf_feature_fraction_grid") cfg.rf_feature_fraction_grid = parse_double_list(key, value);
    else if (key == "rf_max_depth") cfg.rf_max_depth = parse_int_list(key, value).at(0);
    else if (key == "rf_min_leaf") cfg.rf_min_leaf = parse_int_list(key, value).at(0);
    else if (key == "gb_trees") cfg.gb_trees = parse_int_list(key, value).at(0);
    else if (key == "gb_depth_grid") cfg.gb_depth_grid = parse_int_list(key, value);
    else if (key == "gb_learning_rate") cfg.gb_learning_rate = parse_double_list(key, value).at(0);
    else if (key == "gb_subsample") cfg.gb_subsample = parse_double_list(key, value).at(0);
    else if (key == "lda_iterations") cfg.lda_iterations = parse_int_list(key, value).at(0);
    else if (key == "lda_infer_sweeps") cfg.lda_infer_sweeps = parse_int_list(key, value).at(0);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open config file");
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(path, lineno, "expected key = value");
        try {
            apply_config_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw ParseError(path, lineno, e.what());
        }
    }
}

StackerOptions stacker_options(const RunConfig& cfg) {
    StackerOptions opt;
    opt.top_folds = cfg.folds;
    if (cfg.lda_iterations > 0) opt.lda_iterations = cfg.lda_iterations;
    if (cfg.lda_infer_sweeps > 0) opt.lda_infer_sweeps = cfg.lda_infer_sweeps;

    auto apply_rf_scalars = [&](HyperParams& hp) {
        if (cfg.rf_trees > 0) hp.rf_trees = cfg.rf_trees;
        if (cfg.rf_max_depth > 0) hp.rf_max_depth = cfg.rf_max_depth;
        if (cfg.rf_min_leaf > 0) hp.rf_min_leaf = cfg.rf_min_leaf;
    };
    if (!cfg.ridge_lambda_grid.empty()) {
        std::vector<HyperParams> grid;
        for (double l : cfg.ridge_lambda_grid) {
            HyperParams hp;
            hp.ridge_lambda = l;
            grid.push_back(hp);
        }
        opt.grids[static_cast<size_t>(RegressorKind::Ridge)] = grid;
    }
    if (!cfg.svr_c_grid.empty() || !cfg.svr_gamma_grid.empty() || cfg.svr_epsilon != 0.1) {
        std::vector<double> cs = cfg.svr_c_grid.empty() ? std::vector<double>{0.1, 1, 10} : cfg.svr_c_grid;
        std::vector<double> gs = cfg.svr_gamma_grid.empty() ? std::vector<double>{0.01, 0.1, 1} : cfg.svr_gamma_grid;
        std::vector<HyperParams> grid;
        for (double c : cs)
            for (double g : gs) {
                HyperParams hp;
                hp.svr_c = c;
                hp.svr_gamma = g;
                hp.svr_epsilon = cfg.svr_epsilon;
                grid.push_back(hp);
            }
        opt.grids[static_cast<size_t>(RegressorKind::SvrRbf)] = grid;
    }
    if (!cfg.rf_feature_fraction_grid.empty() || cfg.rf_trees > 0 || cfg.rf_max_depth > 0 ||
        cfg.rf_min_leaf > 0) {
        std::vector<double> ffs = cfg.rf_feature_fraction_grid.empty()
                                      ? std::vector<double>{0.3, 0.6, 1.0}
                                      : cfg.rf_feature_fraction_grid;
        std::vector<HyperParams> grid;
        for (double ff : ffs) {
            HyperParams hp;
            hp.rf_feature_fraction = ff;
            apply_rf_scalars(hp);
            grid.push_back(hp);
        }
        opt.grids[static_cast<size_t>(RegressorKind::RandomForest)] = grid;
    }
    if (!cfg.gb_depth_grid.empty() || cfg.gb_trees > 0 || cfg.gb_learning_rate > 0 ||
        cfg.gb_subsample > 0) {
        std::vector<int> depths = cfg.gb_depth_grid.empty() ? std::vector<int>{2, 3} : cfg.gb_depth_grid;
        std::vector<HyperParams> grid;
        for (int d : depths) {
            HyperParams hp;
            hp.gb_max_depth = d;
            if (cfg.gb_trees > 0) hp.gb_trees = cfg.gb_trees;
            if (cfg.gb_learning_rate > 0) hp.gb_learning_rate = cfg.gb_learning_rate;
            if (cfg.gb_subsample > 0) hp.gb_subsample = cfg.gb_subsample;
            grid.push_back(hp);
        }
        opt.grids[static_cast<size_t>(RegressorKind::GradientBoosting)] = grid;
    }
    return opt;
}

std::string config_snapshot(const RunConfig& cfg) {
    std::ostringstream out;
    out << "responses = " << cfg.responses << "\n";
    out << "questions = " << cfg.questions << "\n";
    if (!cfg.deps.empty()) out << "deps = " << cfg.deps << "\n";
    out << "features = " << cfg.features << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "folds = " << cfg.folds << "\n";
    out << "models = " << cfg.models << "\n";
    out << "eval_partition = " << cfg.eval_partition << "\n";
    auto dump_list = [&](const char* key, const auto& v) {
        if (v.empty()) return;
        out << key << " = ";
        for (size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
        out << "\n";
    };
    dump_list("ridge_lambda_grid", cfg.ridge_lambda_grid);
    dump_list("svr_c_grid", cfg.svr_c_grid);
    dump_list("svr_gamma_grid", cfg.svr_gamma_grid);
    if (cfg.svr_epsilon != 0.1) out << "svr_epsilon = " << cfg.svr_epsilon << "\n";
    if (cfg.rf_trees > 0) out << "rf_trees = " << cfg.rf_trees << "\n";
    dump_list("rf_feature_fraction_grid", cfg.rf_feature_fraction_grid);
    if (cfg.rf_max_depth > 0) out << "rf_max_depth = " << cfg.rf_max_depth << "\n";
    if (cfg.rf_min_leaf > 0) out << "rf_min_leaf = " << cfg.rf_min_leaf << "\n";
    if (cfg.gb_trees > 0) out << "gb_trees = " << cfg.gb_trees << "\n";
    dump_list("gb_depth_grid", cfg.gb_depth_grid);
    if (cfg.gb_learning_rate > 0) out << "gb_learning_rate = " << cfg.gb_learning_rate << "\n";
    if (cfg.gb_subsample > 0) out << "gb_subsample = " << cfg.gb_subsample << "\n";
    if (cfg.lda_iterations > 0) out << "lda_iterations = " << cfg.lda_iterations << "\n";
    if (cfg.lda_infer_sweeps > 0) out << "lda_infer_sweeps = " << cfg.lda_infer_sweeps << "\n";
    return out.str();
}

std::string fmt_digest(uint64_t digest) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(path, 0, "cannot write file");
    out << content;
}

std::optional<RegressorKind> parse_kind(const std::string& name) {
    if (name == "linear") return RegressorKind::LeastSquares;
    if (name == "ridge") return RegressorKind::Ridge;
    if (name == "svr") return RegressorKind::SvrRbf;
    if (name == "rf") return RegressorKind::RandomForest;
    if (name == "gb") return RegressorKind::GradientBoosting;
    return std::nullopt;
}

DependencyMap load_deps_checked(const RunConfig& cfg, const Dataset& ds, FeatureConfig config) {
    DependencyMap deps;
    if (cfg.deps.empty()) {
        if (config_has_deps(config))
            throw std::invalid_argument("feature config " + std::string(feature_config_name(config)) +
                                        " requires a dependency annotation file (--deps)");
        return deps;
    }
    std::vector<std::string> warnings;
    deps = load_dependencies(cfg.deps, &ds, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return deps;
}

const DependencyAnnotation* dep_of(const DependencyMap& deps, long long rid) {
    auto it = deps.find(rid);
    return it == deps.end() ? nullptr : &it->second;
}

// ----------------------------------------------------------------- train --

int cmd_train(RunConfig cfg) {
    if (cfg.responses.empty() || cfg.questions.empty())
        throw std::invalid_argument("train requires --responses and --questions");
    const FeatureConfig config = parse_feature_config(cfg.features);
    Dataset ds = load_dataset(cfg.responses, cfg.questions);
    DependencyMap deps = load_deps_checked(cfg, ds, config);
    const StackerOptions opt = stacker_options(cfg);

    fs::create_directories(cfg.out);
    ModelArtifact art;
    art.seed = cfg.seed;
    art.config_text = config_snapshot(cfg);

    std::vector<int> qids;
    for (const auto& q : ds.questions) qids.push_back(q.question_id);
    std::sort(qids.begin(), qids.end());

    std::string cv_log = "QuestionId\tModel\tGridIndex\tCvMse\n";
    std::string fold_log = "QuestionId\tLearner\tResponseId\tFold\n";
    for (int qid : qids) {
        std::cerr << "training question " << qid << " (" << feature_config_name(config) << ")\n";
        QuestionFit qf;
        try {
            qf = fit_question_model(ds, qid, config, derive_seed(cfg.seed, "question", qid),
                                    deps.empty() ? nullptr : &deps, opt);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("question " + std::to_string(qid) + ": " + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error("question " + std::to_string(qid) + ": training failed: " +
                                     e.what());
        }
        for (RegressorKind kind : kAllRegressorKinds) {
            const auto& sel = qf.diagnostics.selection[static_cast<size_t>(kind)];
            cv_log += std::to_string(qid);
            cv_log += '\t';
            cv_log += regressor_name(kind);
            cv_log += '\t';
            cv_log += std::to_string(sel.best_index);
            cv_log += '\t';
            cv_log += sel.cv_mse.empty() ? "-" : fmt_full(sel.cv_mse[sel.best_index]);
            cv_log += '\n';
        }
        // stable order for the fold log
        std::vector<std::string> labels;
        for (const auto& [label, folds] : qf.diagnostics.fold_of) labels.push_back(label);
        std::sort(labels.begin(), labels.end());
        const auto train_rows = ds.select(qid, Partition::Train);
        for (const auto& label : labels) {
            const auto& folds = qf.diagnostics.fold_of.at(label);
            for (size_t i = 0; i < folds.size(); ++i)
                fold_log += std::to_string(qid) + "\t" + label + "\t" +
                            std::to_string(train_rows[i]->response_id) + "\t" +
                            std::to_string(folds[i]) + "\n";
        }
        art.models.push_back(std::move(qf.model));
    }

    const std::string model_path = (fs::path(cfg.out) / "model.sas").string();
    const uint64_t digest = save_artifact(art, model_path);
    const std::string stamp = "# seed=" + std::to_string(cfg.seed) + " digest=" + fmt_digest(digest) + "\n";

    std::string manifest;
    manifest += "artifact = model.sas\n";
    manifest += "format_version = " + std::to_string(kArtifactVersion) + "\n";
    manifest += "digest = " + fmt_digest(digest) + "\n";
    manifest += "seed = " + std::to_string(cfg.seed) + "\n";
    manifest += "questions =";
    for (int qid : qids) manifest += " " + std::to_string(qid);
    manifest += "\n--- run configuration ---\n" + art.config_text;
    write_file((fs::path(cfg.out) / "model.manifest.txt").string(), manifest);
    write_file((fs::path(cfg.out) / "train_log.tsv").string(), stamp + cv_log);
    write_file((fs::path(cfg.out) / "fold_assignments.tsv").string(), stamp + fold_log);

    std::cout << "wrote " << model_path << " digest=" << fmt_digest(digest) << "\n";
    return 0;
}

// --------------------------------------------------------------- predict --

struct PredictRow {
    long long response_id;
    int question_id;
    std::string text;
};

// Prediction input uses the response TSV layout but skips scale validation:
// score columns may be placeholders for unscored responses.
std::vector<PredictRow> load_predict_rows(const std::string& path) {
    auto lines = detail::read_lines(path);
    if (lines.empty()) throw ParseError(path, 0, "missing header row");
    if (lines[0] != "Id\tQuestionId\tScore1\tScore2\tPartition\tText")
        throw ParseError(path, 1, "unexpected header: " + lines[0]);
    std::vector<PredictRow> rows;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_tabs(lines[i], 6);
        if (f.size() != 6)
            throw ParseError(path, static_cast<long>(i + 1),
                             "expected 6 columns, got " + std::to_string(f.size()));
        long long rid, qid;
        if (!parse_int(f[0], rid)) throw ParseError(path, static_cast<long>(i + 1), "bad Id: " + f[0]);
        if (!parse_int(f[1], qid)) throw ParseError(path, static_cast<long>(i + 1), "bad QuestionId: " + f[1]);
        rows.push_back({rid, static_cast<int>(qid), f[5]});
    }
    return rows;
}

int cmd_predict(const std::string& artifact_path, const std::string& responses_path,
                const std::string& out_path, const std::string& model_sel,
                const std::string& deps_path) {
    ModelArtifact art = load_artifact(artifact_path);
    std::map<int, const QuestionModel*> by_qid;
    bool needs_deps = false;
    for (const auto& qm : art.models) {
        by_qid[qm.question_id] = &qm;
        needs_deps |= config_has_deps(qm.config);
    }
    DependencyMap deps;
    if (!deps_path.empty())
        deps = load_dependencies(deps_path);
    else if (needs_deps)
        throw std::invalid_argument("artifact was trained with dependency features; --deps is required");

    std::optional<RegressorKind> kind;
    if (model_sel != "ensemble") {
        kind = parse_kind(model_sel);
        if (!kind) throw std::invalid_argument("unknown model '" + model_sel + "'");
    }

    std::vector<PredictRow> rows = load_predict_rows(responses_path);
    std::string out = "# seed=" + std::to_string(art.seed) + " digest=" + fmt_digest(art.digest) + "\n";
    out += "ResponseId\tQuestionId\tUnrounded\tFinal\n";
    for (const auto& row : rows) {
        auto it = by_qid.find(row.question_id);
        if (it == by_qid.end())
            throw std::invalid_argument("unknown question id " + std::to_string(row.question_id) +
                                        " (response " + std::to_string(row.response_id) + ")");
        Response r;
        r.response_id = row.response_id;
        r.question_id = row.question_id;
        r.text = row.text;
        const DependencyAnnotation* ann = dep_of(deps, row.response_id);
        ScorePrediction p = kind ? it->second->predict_single(r, *kind, ann)
                                 : it->second->predict_ensemble(r, ann);
        out += std::to_string(p.response_id) + "\t" + std::to_string(row.question_id) + "\t" +
               fmt_full(p.unrounded) + "\t" + std::to_string(p.final_score) + "\n";
    }
    write_file(out_path, out);
    std::cout << "wrote " << out_path << " (" << rows.size() << " rows)\n";
    return 0;
}

// -------------------------------------------------------------- evaluate --

int cmd_evaluate(const std::string& pred_path, const std::string& responses_path,
                 const std::string& questions_path, const std::string& out_dir) {
    Dataset ds = load_dataset(responses_path, questions_path);
    std::map<long long, const Response*> gold_by_id;
    for (const auto& r : ds.responses) gold_by_id[r.response_id] = &r;

    auto lines = detail::read_lines(pred_path);
    std::string stamp = "# seed=- digest=-\n";
    size_t start = 0;
    if (!lines.empty() && lines[0].starts_with("#")) {
        stamp = lines[0] + "\n";
        start = 1;
    }
    if (start >= lines.size() || lines[start] != "ResponseId\tQuestionId\tUnrounded\tFinal")
        throw ParseError(pred_path, static_cast<long>(start + 1), "unexpected predictions header");

    std::map<int, QuestionEval> evals;
    for (size_t i = start + 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_tabs(lines[i]);
        if (f.size() != 4)
            throw ParseError(pred_path, static_cast<long>(i + 1), "expected 4 columns");
        long long rid, qid, final_score;
        if (!parse_int(f[0], rid) || !parse_int(f[1], qid) || !parse_int(f[3], final_score))
            throw ParseError(pred_path, static_cast<long>(i + 1), "bad row");
        auto git = gold_by_id.find(rid);
        if (git == gold_by_id.end())
            throw std::invalid_argument("prediction id " + std::to_string(rid) +
                                        " has no gold response");
        if (git->second->question_id != qid)
            throw std::invalid_argument("prediction id " + std::to_string(rid) +
                                        " question mismatch");
        const QuestionSpec& q = ds.question(static_cast<int>(qid));
        QuestionEval& ev = evals[q.question_id];
        ev.question_id = q.question_id;
        ev.score_min = q.score_min;
        ev.score_max = q.score_max;
        ev.unrounded.push_back(std::stod(f[2]));
        ev.final_scores.push_back(static_cast<int>(final_score));
        ev.gold.push_back(gold_score(*git->second));
    }
    if (evals.empty()) throw std::invalid_argument("no prediction rows to evaluate");

    std::vector<QuestionEval> list;
    for (auto& [qid, ev] : evals) list.push_back(std::move(ev));
    AggregateReport rep = evaluate(list);

    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "report.tsv").string(), stamp + render_report_tsv(rep));

    std::vector<std::pair<std::string, std::array<double, 3>>> rows{
        {"aggregate", {rep.mean_pearson, rep.mean_qwk, rep.asap_kappa}}};
    std::string table = render_metric_table("Scope", rows);
    write_file((fs::path(out_dir) / "report.txt").string(), stamp + table);
    std::cout << table;
    return 0;
}

// ---------------------------------------------------------------- ablate --

int cmd_ablate(RunConfig cfg) {
    if (cfg.responses.empty() || cfg.questions.empty())
        throw std::invalid_argument("ablate requires --responses and --questions");
    Dataset ds = load_dataset(cfg.responses, cfg.questions);
    // the harness spans BASE_DEPS and ALL, so annotations are mandatory
    DependencyMap deps = load_deps_checked(cfg, ds, FeatureConfig::All);
    const StackerOptions opt = stacker_options(cfg);

    Partition eval_part;
    if (cfg.eval_partition == "test") eval_part = Partition::Test;
    else if (cfg.eval_partition == "leaderboard") eval_part = Partition::Leaderboard;
    else throw std::invalid_argument("eval_partition must be test or leaderboard");

    std::vector<int> qids;
    for (const auto& q : ds.questions) qids.push_back(q.question_id);
    std::sort(qids.begin(), qids.end());

    std::map<FeatureConfig, std::vector<QuestionEval>> config_evals;
    std::map<int, std::vector<QuestionEval>> kind_evals;  // index by RegressorKind, 5 = ensemble

    for (int qid : qids) {
        const QuestionSpec& q = ds.question(qid);
        const auto eval_rows = ds.select(qid, eval_part);
        if (eval_rows.empty())
            throw std::invalid_argument("question " + std::to_string(qid) + ": empty " +
                                        cfg.eval_partition + " partition");
        std::cerr << "ablate: fitting sub-models for question " << qid << "\n";
        SubModelSet sub = fit_sub_models(ds, qid, FeatureConfig::All,
                                         derive_seed(cfg.seed, "question", qid), &deps, opt);
        for (FeatureConfig config : kAllFeatureConfigs) {
            std::cerr << "ablate: question " << qid << " config " << feature_config_name(config)
                      << "\n";
            QuestionFit qf = fit_top_level(sub, config);
            QuestionEval ev;
            ev.question_id = qid;
            ev.score_min = q.score_min;
            ev.score_max = q.score_max;
            std::vector<QuestionEval> per_kind(6, ev);
            for (const Response* r : eval_rows) {
                const DependencyAnnotation* ann = dep_of(deps, r->response_id);
                const std::vector<double> fv = qf.model.assemble_apply(*r, ann);
                const auto kinds = qf.model.predict_all_kinds(fv);
                double mean = 0;
                for (double v : kinds) mean += v;
                mean /= 5.0;
                ev.unrounded.push_back(mean);
                ev.final_scores.push_back(finalize_score(mean, q.score_min, q.score_max));
                ev.gold.push_back(gold_score(*r));
                if (config == FeatureConfig::Base) {
                    for (size_t k = 0; k < 5; ++k) {
                        per_kind[k].unrounded.push_back(kinds[k]);
                        per_kind[k].final_scores.push_back(
                            finalize_score(kinds[k], q.score_min, q.score_max));
                        per_kind[k].gold.push_back(gold_score(*r));
                    }
                }
            }
            config_evals[config].push_back(ev);
            if (config == FeatureConfig::Base) {
                for (size_t k = 0; k < 5; ++k) kind_evals[static_cast<int>(k)].push_back(per_kind[k]);
                kind_evals[5].push_back(ev);  // ensemble row reuses the BASE ensemble
            }
        }
    }

    fs::create_directories(cfg.out);
    const std::string snapshot = config_snapshot(cfg);
    const uint64_t digest = fnv1a64(snapshot);
    const std::string stamp =
        "# seed=" + std::to_string(cfg.seed) + " digest=" + fmt_digest(digest) + "\n";

    // Table 3 layout: single model types with BASE features, then ensemble
    std::vector<std::pair<std::string, std::array<double, 3>>> t3;
    std::string t3_tsv = "Model\tAvgCorrel\tAvgQwk\tAsapQwk\n";
    for (int k = 0; k < 6; ++k) {
        AggregateReport rep = evaluate(kind_evals.at(k));
        const std::string label =
            k < 5 ? regressor_name(static_cast<RegressorKind>(k)) : "ensemble";
        t3.push_back({label, {rep.mean_pearson, rep.mean_qwk, rep.asap_kappa}});
        t3_tsv += label + "\t" + fmt_full(rep.mean_pearson) + "\t" + fmt_full(rep.mean_qwk) +
                  "\t" + fmt_full(rep.asap_kappa) + "\n";
    }
    // Table 4 layout: the ensemble across feature sets
    std::vector<std::pair<std::string, std::array<double, 3>>> t4;
    std::string t4_tsv = "FeatureSet\tAvgCorrel\tAvgQwk\tAsapQwk\n";
    for (FeatureConfig config : kAllFeatureConfigs) {
        AggregateReport rep = evaluate(config_evals.at(config));
        t4.push_back({feature_config_label(config),
                      {rep.mean_pearson, rep.mean_qwk, rep.asap_kappa}});
        t4_tsv += std::string(feature_config_name(config)) + "\t" + fmt_full(rep.mean_pearson) +
                  "\t" + fmt_full(rep.mean_qwk) + "\t" + fmt_full(rep.asap_kappa) + "\n";
    }

    write_file((fs::path(cfg.out) / "table3.tsv").string(), stamp + t3_tsv);
    write_file((fs::path(cfg.out) / "table4.tsv").string(), stamp + t4_tsv);
    const std::string t3_txt = render_metric_table("Model Type", t3);
    const std::string t4_txt = render_metric_table("Feature Set", t4);
    write_file((fs::path(cfg.out) / "table3.txt").string(), stamp + t3_txt);
    write_file((fs::path(cfg.out) / "table4.txt").string(), stamp + t4_txt);
    std::cout << t3_txt << "\n" << t4_txt;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"short-answer scoring engine"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--seed", cfg.seed, "master random seed");
        sub->add_option("--features", cfg.features, "feature configuration name");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--deps", cfg.deps, "dependency annotation TSV");
        sub->add_option("--folds", cfg.folds, "cross-validation folds for the top level");
        sub->add_option("--responses", cfg.responses, "responses TSV");
        sub->add_option("--questions", cfg.questions, "questions TSV");
        sub->add_option("--eval-partition", cfg.eval_partition, "test or leaderboard");
    };

    CLI::App* train = app.add_subcommand("train", "fit question models and save an artifact");
    add_common(train);

    CLI::App* predict = app.add_subcommand("predict", "score responses with a saved artifact");
    std::string artifact_path, pred_out = "predictions.tsv", model_sel = "ensemble";
    predict->add_option("--artifact", artifact_path, "model artifact")->required();
    predict->add_option("--responses", cfg.responses, "responses TSV")->required();
    predict->add_option("--out", pred_out, "predictions output path");
    predict->add_option("--model", model_sel, "ensemble|linear|ridge|svr|rf|gb");
    predict->add_option("--deps", cfg.deps, "dependency annotation TSV");

    CLI::App* eval = app.add_subcommand("evaluate", "agreement report for predictions");
    std::string eval_pred;
    eval->add_option("--pred", eval_pred, "predictions TSV")->required();
    eval->add_option("--responses", cfg.responses, "gold responses TSV")->required();
    eval->add_option("--questions", cfg.questions, "questions TSV")->required();
    eval->add_option("--out", cfg.out, "output directory");

    CLI::App* ablate = app.add_subcommand("ablate", "feature-set and model-type ablation tables");
    add_common(ablate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        // config file first, then flags passed on the command line win
        if (!config_path.empty()) {
            RunConfig from_file;
            load_config_file(from_file, config_path);
            RunConfig merged = from_file;
            for (CLI::App* sub : {train, ablate}) {
                if (!sub->parsed()) continue;
                if (sub->count("--seed")) merged.seed = cfg.seed;
                if (sub->count("--features")) merged.features = cfg.features;
                if (sub->count("--out")) merged.out = cfg.out;
                if (sub->count("--deps")) merged.deps = cfg.deps;
                if (sub->count("--folds")) merged.folds = cfg.folds;
                if (sub->count("--responses")) merged.responses = cfg.responses;
                if (sub->count("--questions")) merged.questions = cfg.questions;
                if (sub->count("--eval-partition")) merged.eval_partition = cfg.eval_partition;
            }
            cfg = merged;
        }
        if (train->parsed()) return cmd_train(cfg);
        if (predict->parsed()) return cmd_predict(artifact_path, cfg.responses, pred_out, model_sel, cfg.deps);
        if (eval->parsed()) return cmd_evaluate(eval_pred, cfg.responses, cfg.questions, cfg.out);
        if (ablate->parsed()) return cmd_ablate(cfg);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
