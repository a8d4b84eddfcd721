#pragma once

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "sas/stacker.hpp"

namespace sas {

// Little-endian binary writer/reader. Hash maps are serialized in sorted key
// order so equal models produce byte-identical files.
namespace detail {

class BinWriter {
   public:
    std::string buf;

    void u8(uint8_t v) { buf.push_back(static_cast<char>(v)); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void str(std::string_view s) {
        u64(s.size());
        buf.append(s);
    }
    void vec_f64(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void vec_i64(const std::vector<long long>& v) {
        u64(v.size());
        for (long long x : v) i64(x);
    }
    void vec_str(const std::vector<std::string>& v) {
        u64(v.size());
        for (const auto& s : v) str(s);
    }
};

class BinReader {
   public:
    explicit BinReader(std::string data) : data_(std::move(data)) {}

    size_t pos() const { return pos_; }
    size_t size() const { return data_.size(); }
    const std::string& data() const { return data_; }

    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(data_[pos_++]);
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_++])) << (8 * i);
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(data_[pos_++])) << (8 * i);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    int64_t i64() { return static_cast<int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const uint64_t len = u64();
        need(len);
        std::string s = data_.substr(pos_, len);
        pos_ += len;
        return s;
    }
    std::vector<double> vec_f64() {
        std::vector<double> v(u64());
        for (auto& x : v) x = f64();
        return v;
    }
    std::vector<long long> vec_i64() {
        std::vector<long long> v(u64());
        for (auto& x : v) x = i64();
        return v;
    }
    std::vector<std::string> vec_str() {
        std::vector<std::string> v(u64());
        for (auto& s : v) s = str();
        return v;
    }

   private:
    void need(uint64_t n) {
        if (pos_ + n > data_.size()) throw std::runtime_error("artifact truncated");
    }
    std::string data_;
    size_t pos_ = 0;
};

inline void write_tree(BinWriter& w, const RegressionTree& t) {
    w.u64(t.nodes.size());
    for (const auto& nd : t.nodes) {
        w.i32(nd.feature);
        w.f64(nd.threshold);
        w.i32(nd.left);
        w.i32(nd.right);
        w.f64(nd.value);
    }
}

inline RegressionTree read_tree(BinReader& r) {
    RegressionTree t;
    t.nodes.resize(r.u64());
    for (auto& nd : t.nodes) {
        nd.feature = r.i32();
        nd.threshold = r.f64();
        nd.left = r.i32();
        nd.right = r.i32();
        nd.value = r.f64();
    }
    return t;
}

inline void write_regressor(BinWriter& w, const FittedRegressor& m) {
    w.u8(static_cast<uint8_t>(m.kind));
    w.u64(m.dim);
    w.u64(m.seed);
    w.f64(m.hp.ridge_lambda);
    w.f64(m.hp.svr_c);
    w.f64(m.hp.svr_epsilon);
    w.f64(m.hp.svr_gamma);
    w.i32(m.hp.rf_trees);
    w.i32(m.hp.rf_max_depth);
    w.i32(m.hp.rf_min_leaf);
    w.f64(m.hp.rf_feature_fraction);
    w.i32(m.hp.gb_trees);
    w.i32(m.hp.gb_max_depth);
    w.f64(m.hp.gb_learning_rate);
    w.f64(m.hp.gb_subsample);
    w.vec_f64(m.standardizer.mean);
    w.vec_f64(m.standardizer.scale);
    w.u8(m.constant_target ? 1 : 0);
    switch (m.kind) {
        case RegressorKind::LeastSquares:
        case RegressorKind::Ridge:
            w.vec_f64(m.linear_coef);
            w.f64(m.intercept);
            break;
        case RegressorKind::SvrRbf:
            w.f64(m.svr.c);
            w.f64(m.svr.epsilon);
            w.f64(m.svr.gamma);
            w.f64(m.svr.bias);
            w.u64(m.svr.support_vectors.rows);
            w.u64(m.svr.support_vectors.cols);
            w.vec_f64(m.svr.support_vectors.data);
            w.vec_f64(m.svr.coef);
            break;
        case RegressorKind::RandomForest:
            w.f64(m.forest.oob_mse);
            w.u64(m.forest.trees.size());
            for (const auto& t : m.forest.trees) write_tree(w, t);
            break;
        case RegressorKind::GradientBoosting:
            w.f64(m.gbm.init);
            w.f64(m.gbm.learning_rate);
            w.u64(m.gbm.trees.size());
            for (const auto& t : m.gbm.trees) write_tree(w, t);
            break;
    }
}

inline FittedRegressor read_regressor(BinReader& r) {
    FittedRegressor m;
    m.kind = static_cast<RegressorKind>(r.u8());
    m.dim = r.u64();
    m.seed = r.u64();
    m.hp.ridge_lambda = r.f64();
    m.hp.svr_c = r.f64();
    m.hp.svr_epsilon = r.f64();
    m.hp.svr_gamma = r.f64();
    m.hp.rf_trees = r.i32();
    m.hp.rf_max_depth = r.i32();
    m.hp.rf_min_leaf = r.i32();
    m.hp.rf_feature_fraction = r.f64();
    m.hp.gb_trees = r.i32();
    m.hp.gb_max_depth = r.i32();
    m.hp.gb_learning_rate = r.f64();
    m.hp.gb_subsample = r.f64();
    m.standardizer.mean = r.vec_f64();
    m.standardizer.scale = r.vec_f64();
    m.constant_target = r.u8() != 0;
    switch (m.kind) {
        case RegressorKind::LeastSquares:
        case RegressorKind::Ridge:
            m.linear_coef = r.vec_f64();
            m.intercept = r.f64();
            break;
        case RegressorKind::SvrRbf:
            m.svr.c = r.f64();
            m.svr.epsilon = r.f64();
            m.svr.gamma = r.f64();
            m.svr.bias = r.f64();
            m.svr.support_vectors.rows = r.u64();
            m.svr.support_vectors.cols = r.u64();
            m.svr.support_vectors.data = r.vec_f64();
            m.svr.coef = r.vec_f64();
            break;
        case RegressorKind::RandomForest: {
            m.forest.oob_mse = r.f64();
            m.forest.trees.resize(r.u64());
            for (auto& t : m.forest.trees) t = read_tree(r);
            break;
        }
        case RegressorKind::GradientBoosting: {
            m.gbm.init = r.f64();
            m.gbm.learning_rate = r.f64();
            m.gbm.trees.resize(r.u64());
            for (auto& t : m.gbm.trees) t = read_tree(r);
            break;
        }
    }
    return m;
}

inline void write_vocab(BinWriter& w, const Vocabulary& v) {
    w.u8(static_cast<uint8_t>(v.kind.family));
    w.i32(v.kind.n_min);
    w.i32(v.kind.n_max);
    w.i32(v.top_k);
    w.u64(v.entries.size());
    for (const auto& [unit, freq] : v.entries) {
        w.str(unit);
        w.i64(freq);
    }
}

inline Vocabulary read_vocab(BinReader& r) {
    Vocabulary v;
    v.kind.family = static_cast<UnitKind::Family>(r.u8());
    v.kind.n_min = r.i32();
    v.kind.n_max = r.i32();
    v.top_k = r.i32();
    v.entries.resize(r.u64());
    for (auto& [unit, freq] : v.entries) {
        unit = r.str();
        freq = r.i64();
    }
    return v;
}

inline void write_bag_learner(BinWriter& w, const BaseLearner& bl) {
    w.str(bl.spec.label);
    w.u8(static_cast<uint8_t>(bl.spec.unit_kind.family));
    w.i32(bl.spec.unit_kind.n_min);
    w.i32(bl.spec.unit_kind.n_max);
    w.u8(bl.spec.is_dependency ? 1 : 0);
    w.u8(static_cast<uint8_t>(bl.spec.dep_variant));
    w.u8(static_cast<uint8_t>(bl.spec.learner));
    write_vocab(w, bl.vocab);
    w.u8(bl.degenerate ? 1 : 0);
    write_regressor(w, bl.model);
}

inline BaseLearner read_bag_learner(BinReader& r) {
    BaseLearner bl;
    bl.spec.label = r.str();
    bl.spec.unit_kind.family = static_cast<UnitKind::Family>(r.u8());
    bl.spec.unit_kind.n_min = r.i32();
    bl.spec.unit_kind.n_max = r.i32();
    bl.spec.is_dependency = r.u8() != 0;
    bl.spec.dep_variant = static_cast<DepVariant>(r.u8());
    bl.spec.learner = static_cast<RegressorKind>(r.u8());
    bl.vocab = read_vocab(r);
    bl.degenerate = r.u8() != 0;
    bl.model = read_regressor(r);
    return bl;
}

inline void write_topic_model(BinWriter& w, const TopicModel& tm) {
    w.i32(tm.num_topics);
    w.f64(tm.alpha);
    w.f64(tm.beta);
    w.i32(tm.gibbs_iterations);
    w.u64(tm.seed);
    w.vec_str(tm.vocab);
    w.vec_i64(tm.topic_word);
    w.vec_i64(tm.topic_totals);
}

inline TopicModel read_topic_model(BinReader& r) {
    TopicModel tm;
    tm.num_topics = r.i32();
    tm.alpha = r.f64();
    tm.beta = r.f64();
    tm.gibbs_iterations = r.i32();
    tm.seed = r.u64();
    tm.vocab = r.vec_str();
    tm.topic_word = r.vec_i64();
    tm.topic_totals = r.vec_i64();
    for (size_t i = 0; i < tm.vocab.size(); ++i) tm.vocab_index[tm.vocab[i]] = static_cast<int>(i);
    return tm;
}

inline void write_lm(BinWriter& w, const NgramLM& lm) {
    w.i32(lm.order);
    w.u8(static_cast<uint8_t>(lm.subset));
    w.u8(lm.degenerate ? 1 : 0);
    std::vector<std::string> vocab(lm.vocab.begin(), lm.vocab.end());
    std::sort(vocab.begin(), vocab.end());
    w.vec_str(vocab);
    w.u64(lm.tables.size());
    for (const auto& table : lm.tables) {
        std::vector<const std::pair<const std::string, NgramLM::ContextStats>*> entries;
        entries.reserve(table.size());
        for (const auto& e : table) entries.push_back(&e);
        std::sort(entries.begin(), entries.end(),
                  [](auto* a, auto* b) { return a->first < b->first; });
        w.u64(entries.size());
        for (const auto* e : entries) {
            w.str(e->first);
            w.i64(e->second.total);
            std::vector<std::pair<std::string, long long>> conts(e->second.continuations.begin(),
                                                                 e->second.continuations.end());
            std::sort(conts.begin(), conts.end());
            w.u64(conts.size());
            for (const auto& [word, c] : conts) {
                w.str(word);
                w.i64(c);
            }
        }
    }
}

inline NgramLM read_lm(BinReader& r) {
    NgramLM lm;
    lm.order = r.i32();
    lm.subset = static_cast<LmSubset>(r.u8());
    lm.degenerate = r.u8() != 0;
    for (auto& s : r.vec_str()) lm.vocab.insert(std::move(s));
    lm.tables.resize(r.u64());
    for (auto& table : lm.tables) {
        const uint64_t n = r.u64();
        for (uint64_t i = 0; i < n; ++i) {
            std::string ctx = r.str();
            NgramLM::ContextStats st;
            st.total = r.i64();
            const uint64_t c = r.u64();
            for (uint64_t k = 0; k < c; ++k) {
                std::string word = r.str();
                st.continuations[word] = r.i64();
            }
            table[std::move(ctx)] = std::move(st);
        }
    }
    return lm;
}

inline void write_question_model(BinWriter& w, const QuestionModel& qm) {
    w.i32(qm.question_id);
    w.u8(static_cast<uint8_t>(qm.config));
    w.i32(qm.score_min);
    w.i32(qm.score_max);
    w.u64(qm.seed);
    w.u8(qm.degenerate_gold ? 1 : 0);
    w.i32(qm.lda_infer_sweeps);
    w.u64(qm.knn_k);
    w.vec_str(qm.feature_names);
    w.u64(qm.bag_learners.size());
    for (const auto& bl : qm.bag_learners) write_bag_learner(w, bl);
    w.u8(qm.has_lda ? 1 : 0);
    if (qm.has_lda) {
        write_topic_model(w, qm.lda10);
        write_topic_model(w, qm.lda30);
        std::vector<std::string> lex(qm.wf_lexicon.begin(), qm.wf_lexicon.end());
        std::sort(lex.begin(), lex.end());
        w.vec_str(lex);
    }
    w.u8(qm.has_lms ? 1 : 0);
    if (qm.has_lms) {
        write_lm(w, qm.lm_top);
        write_lm(w, qm.lm_toptwo);
        write_lm(w, qm.lm_zero);
    }
    w.u8(qm.has_knn ? 1 : 0);
    if (qm.has_knn) {
        w.vec_i64(std::vector<long long>(qm.pool_ids.begin(), qm.pool_ids.end()));
        w.u64(qm.pool_tokens.size());
        for (const auto& toks : qm.pool_tokens) w.vec_str(toks);
        w.u64(qm.pool_gold.size());
        for (int g : qm.pool_gold) w.i32(g);
    }
    w.u64(qm.top_models.size());
    for (const auto& m : qm.top_models) write_regressor(w, m);
}

inline QuestionModel read_question_model(BinReader& r) {
    QuestionModel qm;
    qm.question_id = r.i32();
    qm.config = static_cast<FeatureConfig>(r.u8());
    qm.score_min = r.i32();
    qm.score_max = r.i32();
    qm.seed = r.u64();
    qm.degenerate_gold = r.u8() != 0;
    qm.lda_infer_sweeps = r.i32();
    qm.knn_k = r.u64();
    qm.feature_names = r.vec_str();
    qm.bag_learners.resize(r.u64());
    for (auto& bl : qm.bag_learners) bl = read_bag_learner(r);
    qm.has_lda = r.u8() != 0;
    if (qm.has_lda) {
        qm.lda10 = read_topic_model(r);
        qm.lda30 = read_topic_model(r);
        for (auto& s : r.vec_str()) qm.wf_lexicon.insert(std::move(s));
    }
    qm.has_lms = r.u8() != 0;
    if (qm.has_lms) {
        qm.lm_top = read_lm(r);
        qm.lm_toptwo = read_lm(r);
        qm.lm_zero = read_lm(r);
    }
    qm.has_knn = r.u8() != 0;
    if (qm.has_knn) {
        qm.pool_ids = r.vec_i64();
        qm.pool_tokens.resize(r.u64());
        for (auto& toks : qm.pool_tokens) toks = r.vec_str();
        qm.pool_gold.resize(r.u64());
        for (auto& g : qm.pool_gold) g = r.i32();
    }
    qm.top_models.resize(r.u64());
    for (auto& m : qm.top_models) m = read_regressor(r);
    qm.rebuild_caches();
    return qm;
}

}  // namespace detail

constexpr uint32_t kArtifactVersion = 1;
constexpr const char* kArtifactMagic = "SASM";

struct ModelArtifact {
    uint32_t version = kArtifactVersion;
    uint64_t seed = 0;
    std::string config_text;  // RunConfig snapshot, key = value lines
    std::vector<QuestionModel> models;
    uint64_t digest = 0;  // filled on save/load
};

inline uint64_t save_artifact(ModelArtifact& art, const std::string& path) {
    detail::BinWriter w;
    w.buf.append(kArtifactMagic);
    w.u32(art.version);
    w.u64(art.seed);
    w.str(art.config_text);
    w.u64(art.models.size());
    for (const auto& qm : art.models) detail::write_question_model(w, qm);
    art.digest = fnv1a64(w.buf);
    w.u64(art.digest);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(path, 0, "cannot write file");
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    return art.digest;
}

inline ModelArtifact load_artifact(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 12 || data.compare(0, 4, kArtifactMagic) != 0)
        throw ParseError(path, 0, "not a model artifact");
    const uint64_t stored = fnv1a64(std::string_view(data).substr(0, data.size() - 8));
    detail::BinReader tail(data.substr(data.size() - 8));
    if (tail.u64() != stored) throw ParseError(path, 0, "artifact digest mismatch");

    detail::BinReader r(data.substr(4, data.size() - 12));
    ModelArtifact art;
    art.version = r.u32();
    if (art.version != kArtifactVersion)
        throw ParseError(path, 0, "unsupported artifact version " + std::to_string(art.version));
    art.seed = r.u64();
    art.config_text = r.str();
    art.models.resize(r.u64());
    for (auto& qm : art.models) qm = detail::read_question_model(r);
    art.digest = stored;
    return art;
}

}  // namespace sas
