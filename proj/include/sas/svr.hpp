#pragma once

#include <cmath>
#include <vector>

#include "sas/tree.hpp"

namespace sas {

struct SvrModel {
    double c = 1.0;
    double epsilon = 0.1;
    double gamma = 0.1;
    double bias = 0.0;
    DMatrix support_vectors;         // standardized rows
    std::vector<double> coef;        // alpha - alpha*, one per support vector
    std::vector<double> objective_path;  // dual objective after each sweep
    int iterations = 0;
    bool converged = false;

    double kernel(const double* a, const double* b, size_t d) const {
        double s = 0.0;
        for (size_t j = 0; j < d; ++j) {
            const double diff = a[j] - b[j];
            s += diff * diff;
        }
        return std::exp(-gamma * s);
    }

    double predict_row(const double* x) const {
        double f = bias;
        for (size_t s = 0; s < support_vectors.rows; ++s)
            f += coef[s] * kernel(support_vectors.row(s), x, support_vectors.cols);
        return f;
    }
};

// Epsilon-SVR trained by SMO on the 2n-variable dual with maximal-violating-
// pair selection. Deterministic: no randomness, scan-order tie breaks.
inline SvrModel fit_svr(const DMatrix& X, const std::vector<double>& y, double C, double epsilon,
                        double gamma, double tol = 1e-3) {
    const size_t n = X.rows;
    const size_t d = X.cols;
    SvrModel model;
    model.c = C;
    model.epsilon = epsilon;
    model.gamma = gamma;

    // full kernel cache
    std::vector<double> K(n * n);
    for (size_t i = 0; i < n; ++i) {
        K[i * n + i] = 1.0;
        for (size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            const double* xi = X.row(i);
            const double* xj = X.row(j);
            for (size_t k = 0; k < d; ++k) {
                const double diff = xi[k] - xj[k];
                s += diff * diff;
            }
            const double v = std::exp(-gamma * s);
            K[i * n + j] = v;
            K[j * n + i] = v;
        }
    }

    const size_t m = 2 * n;  // t < n: +alpha side, t >= n: -alpha side
    auto sign = [&](size_t t) { return t < n ? 1.0 : -1.0; };
    auto base = [&](size_t t) { return t < n ? t : t - n; };
    std::vector<double> alpha(m, 0.0);
    std::vector<double> grad(m);
    for (size_t t = 0; t < m; ++t)
        grad[t] = t < n ? epsilon - y[t] : epsilon + y[t - n];

    auto q = [&](size_t s, size_t t) { return sign(s) * sign(t) * K[base(s) * n + base(t)]; };

    const long long max_iter = std::max<long long>(200000, 100 * static_cast<long long>(n));
    const long long sweep = std::max<long long>(1, static_cast<long long>(n));
    long long iter = 0;
    double rho = 0.0;

    auto dual_objective = [&] {
        double obj = 0.0;
        for (size_t t = 0; t < m; ++t) {
            const double p = t < n ? epsilon - y[t] : epsilon + y[t - n];
            obj += alpha[t] * (grad[t] + p);
        }
        return 0.5 * obj;
    };

    while (iter < max_iter) {
        // maximal violating pair
        double g_max = -1e308, g_min = 1e308;
        long long i = -1, j = -1;
        for (size_t t = 0; t < m; ++t) {
            const double yt = sign(t);
            const bool in_up = yt > 0 ? alpha[t] < C : alpha[t] > 0;
            const bool in_low = yt > 0 ? alpha[t] > 0 : alpha[t] < C;
            const double v = -yt * grad[t];
            if (in_up && v > g_max) {
                g_max = v;
                i = static_cast<long long>(t);
            }
            if (in_low && v < g_min) {
                g_min = v;
                j = static_cast<long long>(t);
            }
        }
        if (i < 0 || j < 0 || g_max - g_min < tol) {
            model.converged = true;
            rho = -(g_max + g_min) / 2.0;
            break;
        }
        const size_t ii = static_cast<size_t>(i), jj = static_cast<size_t>(j);
        const double yi = sign(ii), yj = sign(jj);
        const double old_ai = alpha[ii], old_aj = alpha[jj];
        constexpr double kTau = 1e-12;
        if (yi != yj) {
            double quad = q(ii, ii) + q(jj, jj) + 2.0 * q(ii, jj);
            if (quad <= 0) quad = kTau;
            const double delta = (-grad[ii] - grad[jj]) / quad;
            const double diff = alpha[ii] - alpha[jj];
            alpha[ii] += delta;
            alpha[jj] += delta;
            if (diff > 0) {
                if (alpha[jj] < 0) {
                    alpha[jj] = 0;
                    alpha[ii] = diff;
                }
            } else {
                if (alpha[ii] < 0) {
                    alpha[ii] = 0;
                    alpha[jj] = -diff;
                }
            }
            if (diff > 0) {
                if (alpha[ii] > C) {
                    alpha[ii] = C;
                    alpha[jj] = C - diff;
                }
            } else {
                if (alpha[jj] > C) {
                    alpha[jj] = C;
                    alpha[ii] = C + diff;
                }
            }
        } else {
            double quad = q(ii, ii) + q(jj, jj) - 2.0 * q(ii, jj);
            if (quad <= 0) quad = kTau;
            const double delta = (grad[ii] - grad[jj]) / quad;
            const double s = alpha[ii] + alpha[jj];
            alpha[ii] -= delta;
            alpha[jj] += delta;
            if (s > C) {
                if (alpha[ii] > C) {
                    alpha[ii] = C;
                    alpha[jj] = s - C;
                }
            } else {
                if (alpha[jj] < 0) {
                    alpha[jj] = 0;
                    alpha[ii] = s;
                }
            }
            if (s > C) {
                if (alpha[jj] > C) {
                    alpha[jj] = C;
                    alpha[ii] = s - C;
                }
            } else {
                if (alpha[ii] < 0) {
                    alpha[ii] = 0;
                    alpha[jj] = s;
                }
            }
        }
        const double d_ai = alpha[ii] - old_ai;
        const double d_aj = alpha[jj] - old_aj;
        for (size_t t = 0; t < m; ++t) grad[t] += q(t, ii) * d_ai + q(t, jj) * d_aj;
        ++iter;
        if (iter % sweep == 0) model.objective_path.push_back(dual_objective());
    }
    model.iterations = static_cast<int>(iter);
    if (!model.converged) {
        // bias from the current bounds
        double g_max = -1e308, g_min = 1e308;
        for (size_t t = 0; t < m; ++t) {
            const double yt = sign(t);
            const bool in_up = yt > 0 ? alpha[t] < C : alpha[t] > 0;
            const bool in_low = yt > 0 ? alpha[t] > 0 : alpha[t] < C;
            const double v = -yt * grad[t];
            if (in_up && v > g_max) g_max = v;
            if (in_low && v < g_min) g_min = v;
        }
        rho = -(g_max + g_min) / 2.0;
    }
    model.objective_path.push_back(dual_objective());
    model.bias = -rho;

    std::vector<size_t> sv_rows;
    for (size_t t = 0; t < n; ++t)
        if (alpha[t] - alpha[t + n] != 0.0) sv_rows.push_back(t);
    model.support_vectors = DMatrix(sv_rows.size(), d);
    model.coef.resize(sv_rows.size());
    for (size_t s = 0; s < sv_rows.size(); ++s) {
        const size_t r = sv_rows[s];
        model.coef[s] = alpha[r] - alpha[r + n];
        for (size_t k = 0; k < d; ++k) model.support_vectors.at(s, k) = X.at(r, k);
    }
    return model;
}

}  // namespace sas
