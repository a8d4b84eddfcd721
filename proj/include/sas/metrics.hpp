#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sas/common.hpp"

namespace sas {

// Sample Pearson correlation. A constant vector makes the correlation
// undefined; we report 0 and set the degenerate flag.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b,
                      bool* degenerate = nullptr) {
    if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("pearson: need at least 2 samples");
    if (degenerate) *degenerate = false;
    const size_t n = a.size();
    double ma = 0, mb = 0;
    for (size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0, sbb = 0, sab = 0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

// Quadratic weighted kappa over the declared scale [score_min, score_max].
// Expected disagreement comes from the marginal histograms; if it is zero
// (both raters constant and equal) the agreement is perfect by convention.
inline double qwk(const std::vector<int>& h, const std::vector<int>& p, int score_min,
                  int score_max) {
    if (h.size() != p.size()) throw std::invalid_argument("qwk: length mismatch");
    if (h.empty()) throw std::invalid_argument("qwk: empty input");
    const int K = score_max - score_min + 1;
    if (K < 2) throw std::invalid_argument("qwk: need at least 2 categories");
    std::vector<double> hist_h(K, 0.0), hist_p(K, 0.0);
    const double denom = static_cast<double>(K - 1) * static_cast<double>(K - 1);
    double observed = 0.0;
    for (size_t i = 0; i < h.size(); ++i) {
        const int a = h[i] - score_min, b = p[i] - score_min;
        if (a < 0 || a >= K || b < 0 || b >= K)
            throw std::invalid_argument("qwk: rating outside declared scale");
        const double d = static_cast<double>(a - b);
        observed += d * d / denom;
        hist_h[a] += 1.0;
        hist_p[b] += 1.0;
    }
    const double n = static_cast<double>(h.size());
    double expected = 0.0;
    for (int i = 0; i < K; ++i) {
        if (hist_h[i] == 0.0) continue;
        for (int j = 0; j < K; ++j) {
            const double d = static_cast<double>(i - j);
            expected += d * d / denom * hist_h[i] * hist_p[j];
        }
    }
    expected /= n;
    if (expected == 0.0) return 1.0;
    return 1.0 - observed / expected;
}

// ASAP contest aggregate: average the kappas in Fisher z space, map back.
// kappa == 1 is clamped just below 1 (clamped_count reports how often).
inline double fisher_aggregate(const std::vector<double>& kappas, int* clamped_count = nullptr) {
    if (kappas.empty()) throw std::invalid_argument("fisher_aggregate: empty input");
    if (clamped_count) *clamped_count = 0;
    double z_sum = 0.0;
    for (double k : kappas) {
        if (k <= -1.0 || k > 1.0)
            throw std::invalid_argument("fisher_aggregate: kappa outside (-1, 1]");
        if (k == 1.0) {
            k = 1.0 - 1e-15;
            if (clamped_count) ++*clamped_count;
        }
        z_sum += 0.5 * std::log((1.0 + k) / (1.0 - k));
    }
    const double z = z_sum / static_cast<double>(kappas.size());
    const double e2z = std::exp(2.0 * z);
    return (e2z - 1.0) / (e2z + 1.0);
}

struct AgreementStats {
    int question_id = 0;
    double pearson_r = 0.0;
    double qwk = 0.0;
    size_t n = 0;
    bool degenerate_pearson = false;
};

struct AggregateReport {
    std::vector<AgreementStats> per_question;
    double mean_pearson = 0.0;
    double mean_qwk = 0.0;
    double asap_kappa = 0.0;
    int clamped_kappas = 0;
};

struct QuestionEval {
    int question_id = 0;
    int score_min = 0;
    int score_max = 0;
    std::vector<double> unrounded;
    std::vector<int> final_scores;
    std::vector<int> gold;
};

inline AggregateReport evaluate(const std::vector<QuestionEval>& evals) {
    if (evals.empty()) throw std::invalid_argument("evaluate: no questions");
    AggregateReport rep;
    std::vector<double> kappas;
    for (const auto& e : evals) {
        if (e.unrounded.size() != e.gold.size() || e.final_scores.size() != e.gold.size())
            throw std::invalid_argument("evaluate: prediction/gold size mismatch for question " +
                                        std::to_string(e.question_id));
        AgreementStats st;
        st.question_id = e.question_id;
        st.n = e.gold.size();
        std::vector<double> gold_real(e.gold.begin(), e.gold.end());
        st.pearson_r = pearson(e.unrounded, gold_real, &st.degenerate_pearson);
        st.qwk = qwk(e.gold, e.final_scores, e.score_min, e.score_max);
        kappas.push_back(st.qwk);
        rep.mean_pearson += st.pearson_r;
        rep.mean_qwk += st.qwk;
        rep.per_question.push_back(st);
    }
    rep.mean_pearson /= static_cast<double>(evals.size());
    rep.mean_qwk /= static_cast<double>(evals.size());
    rep.asap_kappa = fisher_aggregate(kappas, &rep.clamped_kappas);
    return rep;
}

namespace detail {
inline std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}
inline std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

inline std::string render_report_tsv(const AggregateReport& rep) {
    std::string out = "QuestionId\tN\tPearson\tQWK\n";
    for (const auto& st : rep.per_question) {
        out += std::to_string(st.question_id);
        out += '\t';
        out += std::to_string(st.n);
        out += '\t';
        out += detail::fmt_full(st.pearson_r);
        out += '\t';
        out += detail::fmt_full(st.qwk);
        out += '\n';
    }
    out += "aggregate\t";
    size_t total = 0;
    for (const auto& st : rep.per_question) total += st.n;
    out += std::to_string(total);
    out += '\t';
    out += detail::fmt_full(rep.mean_pearson);
    out += '\t';
    out += detail::fmt_full(rep.mean_qwk);
    out += "\tASAP=";
    out += detail::fmt_full(rep.asap_kappa);
    out += '\n';
    return out;
}

// Rows of (label, avg correlation, avg weighted kappa, ASAP weighted kappa),
// rendered like the results tables: three decimals, aligned columns.
inline std::string render_metric_table(const std::string& row_header,
                                       const std::vector<std::pair<std::string, std::array<double, 3>>>& rows) {
    size_t w = row_header.size();
    for (const auto& [label, vals] : rows) w = std::max(w, label.size());
    auto pad = [&](const std::string& s) {
        std::string out = s;
        out.resize(w, ' ');
        return out;
    };
    std::string out = pad(row_header) + "  Average Correl.  Average Weighted Kappa  ASAP Weighted Kappa\n";
    for (const auto& [label, vals] : rows) {
        out += pad(label);
        out += "  " + detail::fmt3(vals[0]);
        out += std::string(12, ' ');
        out += detail::fmt3(vals[1]);
        out += std::string(17, ' ');
        out += detail::fmt3(vals[2]);
        out += '\n';
    }
    return out;
}

}  // namespace sas
