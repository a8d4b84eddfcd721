#pragma once

// Independent reference implementations used as test oracles. These stay
// deliberately naive (materialized matrices, direct formulas) and must not
// share code with the library paths they check.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

// QWK by explicitly building the observed and expected confusion matrices.
inline double qwk_brute_force(const std::vector<int>& h, const std::vector<int>& p, int score_min,
                              int score_max) {
    const int K = score_max - score_min + 1;
    const int n = static_cast<int>(h.size());
    std::vector<std::vector<double>> O(K, std::vector<double>(K, 0.0));
    std::vector<std::vector<double>> W(K, std::vector<double>(K, 0.0));
    std::vector<double> hist_h(K, 0.0), hist_p(K, 0.0);
    for (int i = 0; i < n; ++i) {
        O[h[i] - score_min][p[i] - score_min] += 1.0;
        hist_h[h[i] - score_min] += 1.0;
        hist_p[p[i] - score_min] += 1.0;
    }
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            W[i][j] = static_cast<double>((i - j) * (i - j)) / ((K - 1.0) * (K - 1.0));
    std::vector<std::vector<double>> E(K, std::vector<double>(K, 0.0));
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) E[i][j] = hist_h[i] * hist_p[j] / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            num += W[i][j] * O[i][j];
            den += W[i][j] * E[i][j];
        }
    if (den == 0.0) return 1.0;
    return 1.0 - num / den;
}

// Textbook Pearson: covariance over the product of standard deviations.
inline double pearson_direct(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
        sab += a[i] * b[i];
    }
    const double cov = sab / n - (sa / n) * (sb / n);
    const double va = saa / n - (sa / n) * (sa / n);
    const double vb = sbb / n - (sb / n) * (sb / n);
    return cov / std::sqrt(va * vb);
}

// Fisher aggregate via long-double artanh/tanh composition.
inline double fisher_aggregate_ld(const std::vector<double>& kappas) {
    long double z = 0.0L;
    for (double k : kappas) z += 0.5L * std::log((1.0L + static_cast<long double>(k)) /
                                                 (1.0L - static_cast<long double>(k)));
    z /= static_cast<long double>(kappas.size());
    return static_cast<double>(std::tanh(z));
}

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double mse(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace oracle
