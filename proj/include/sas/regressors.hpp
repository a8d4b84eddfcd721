#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "sas/svr.hpp"
#include "sas/tree.hpp"

namespace sas {

enum class RegressorKind { LeastSquares, Ridge, SvrRbf, RandomForest, GradientBoosting };

inline const char* regressor_name(RegressorKind k) {
    switch (k) {
        case RegressorKind::LeastSquares: return "linear regression";
        case RegressorKind::Ridge: return "ridge regression";
        case RegressorKind::SvrRbf: return "RBF-SV regression";
        case RegressorKind::RandomForest: return "random forest";
        case RegressorKind::GradientBoosting: return "gradient boosting";
    }
    return "?";
}

constexpr RegressorKind kAllRegressorKinds[] = {
    RegressorKind::LeastSquares, RegressorKind::Ridge, RegressorKind::SvrRbf,
    RegressorKind::RandomForest, RegressorKind::GradientBoosting};

struct HyperParams {
    double ridge_lambda = 1.0;
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double svr_gamma = 0.1;
    int rf_trees = 500;
    int rf_max_depth = 25;
    int rf_min_leaf = 5;
    double rf_feature_fraction = 1.0;
    int gb_trees = 500;
    int gb_max_depth = 3;
    double gb_learning_rate = 0.05;
    double gb_subsample = 0.8;
};

// Per-column mean/sd mapping fitted on training data. Constant columns get
// scale 0 and standardize to all-zero.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    void fit(const DMatrix& X) {
        mean.assign(X.cols, 0.0);
        scale.assign(X.cols, 0.0);
        for (size_t i = 0; i < X.rows; ++i)
            for (size_t j = 0; j < X.cols; ++j) mean[j] += X.at(i, j);
        for (size_t j = 0; j < X.cols; ++j) mean[j] /= static_cast<double>(X.rows);
        for (size_t i = 0; i < X.rows; ++i)
            for (size_t j = 0; j < X.cols; ++j) {
                const double d = X.at(i, j) - mean[j];
                scale[j] += d * d;
            }
        for (size_t j = 0; j < X.cols; ++j) {
            scale[j] = std::sqrt(scale[j] / static_cast<double>(X.rows));
            if (scale[j] < 1e-12) scale[j] = 0.0;
        }
    }

    void apply_row(const double* in, double* out) const {
        for (size_t j = 0; j < mean.size(); ++j)
            out[j] = scale[j] == 0.0 ? 0.0 : (in[j] - mean[j]) / scale[j];
    }

    DMatrix apply(const DMatrix& X) const {
        DMatrix out(X.rows, X.cols);
        for (size_t i = 0; i < X.rows; ++i) apply_row(X.row(i), out.row(i));
        return out;
    }
};

struct FittedRegressor {
    RegressorKind kind = RegressorKind::LeastSquares;
    size_t dim = 0;
    HyperParams hp;
    uint64_t seed = 0;
    Standardizer standardizer;
    bool constant_target = false;

    std::vector<double> linear_coef;  // on standardized features
    double intercept = 0.0;
    SvrModel svr;
    ForestModel forest;
    GbmModel gbm;

    double predict_row(const double* x) const {
        std::vector<double> z(dim);
        standardizer.apply_row(x, z.data());
        return predict_standardized(z.data());
    }

    double predict_standardized(const double* z) const {
        switch (kind) {
            case RegressorKind::LeastSquares:
            case RegressorKind::Ridge: {
                double f = intercept;
                for (size_t j = 0; j < dim; ++j) f += linear_coef[j] * z[j];
                return f;
            }
            case RegressorKind::SvrRbf:
                return svr.predict_row(z);
            case RegressorKind::RandomForest:
                return forest.predict_row(z);
            case RegressorKind::GradientBoosting:
                return gbm.predict_row(z);
        }
        return 0.0;
    }

    std::vector<double> predict(const DMatrix& X) const {
        if (X.cols != dim)
            throw std::invalid_argument("predict: feature dimension mismatch (got " +
                                        std::to_string(X.cols) + ", want " + std::to_string(dim) + ")");
        std::vector<double> out(X.rows);
        DMatrix Z = standardizer.apply(X);
        for (size_t i = 0; i < X.rows; ++i) out[i] = predict_standardized(Z.row(i));
        return out;
    }
};

inline FittedRegressor fit(RegressorKind kind, const DMatrix& X, const std::vector<double>& y,
                           const HyperParams& hp, uint64_t seed) {
    if (X.rows < 2) throw std::invalid_argument("fit: need at least 2 rows");
    if (y.size() != X.rows) throw std::invalid_argument("fit: X/y dimension mismatch");
    for (double v : X.data)
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite target value");

    FittedRegressor model;
    model.kind = kind;
    model.dim = X.cols;
    model.hp = hp;
    model.seed = seed;
    model.standardizer.fit(X);
    DMatrix Z = model.standardizer.apply(X);

    model.constant_target = true;
    for (size_t i = 1; i < y.size() && model.constant_target; ++i)
        model.constant_target = y[i] == y[0];

    const size_t n = X.rows, d = X.cols;
    switch (kind) {
        case RegressorKind::LeastSquares: {
            Eigen::MatrixXd A(n, d + 1);
            Eigen::VectorXd b(n);
            for (size_t i = 0; i < n; ++i) {
                A(i, 0) = 1.0;
                for (size_t j = 0; j < d; ++j) A(i, j + 1) = Z.at(i, j);
                b(i) = y[i];
            }
            Eigen::VectorXd w = A.completeOrthogonalDecomposition().solve(b);
            model.intercept = w(0);
            model.linear_coef.resize(d);
            for (size_t j = 0; j < d; ++j) model.linear_coef[j] = w(j + 1);
            break;
        }
        case RegressorKind::Ridge: {
            double ymean = 0.0;
            for (double v : y) ymean += v;
            ymean /= static_cast<double>(n);
            Eigen::MatrixXd A(n, d);
            Eigen::VectorXd b(n);
            for (size_t i = 0; i < n; ++i) {
                for (size_t j = 0; j < d; ++j) A(i, j) = Z.at(i, j);
                b(i) = y[i] - ymean;
            }
            Eigen::VectorXd w;
            if (hp.ridge_lambda > 0.0) {
                Eigen::MatrixXd G = A.transpose() * A;
                G.diagonal().array() += hp.ridge_lambda;
                w = G.ldlt().solve(A.transpose() * b);
            } else {
                w = A.completeOrthogonalDecomposition().solve(b);
            }
            model.intercept = ymean;
            model.linear_coef.resize(d);
            for (size_t j = 0; j < d; ++j) model.linear_coef[j] = w(j);
            break;
        }
        case RegressorKind::SvrRbf:
            model.svr = fit_svr(Z, y, hp.svr_c, hp.svr_epsilon, hp.svr_gamma);
            break;
        case RegressorKind::RandomForest: {
            TreeParams tp{hp.rf_max_depth, hp.rf_min_leaf, hp.rf_feature_fraction};
            model.forest = fit_forest(Z, y, hp.rf_trees, tp, derive_seed(seed, "forest"));
            break;
        }
        case RegressorKind::GradientBoosting:
            model.gbm = fit_gbm(Z, y, hp.gb_trees, hp.gb_max_depth, hp.gb_learning_rate,
                                hp.gb_subsample, derive_seed(seed, "gbm"));
            break;
    }
    return model;
}

inline double mse(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

// Deterministic round-robin fold assignment after a seeded shuffle.
inline std::vector<int> fold_assignment(size_t n, int folds, uint64_t seed) {
    std::vector<int> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> fold(n);
    for (size_t i = 0; i < n; ++i) fold[order[i]] = static_cast<int>(i % folds);
    return fold;
}

struct SelectionResult {
    HyperParams best;
    size_t best_index = 0;
    std::vector<double> cv_mse;  // one per grid point
};

// Grid point minimizing mean cross-validated MSE; ties go to the earliest
// grid position.
inline SelectionResult select_hyperparams(RegressorKind kind, const DMatrix& X,
                                          const std::vector<double>& y,
                                          const std::vector<HyperParams>& grid, int folds,
                                          uint64_t seed) {
    if (grid.empty()) throw std::invalid_argument("select_hyperparams: empty grid");
    if (folds < 2) throw std::invalid_argument("select_hyperparams: folds must be >= 2");
    if (static_cast<size_t>(folds) > X.rows)
        throw std::invalid_argument("select_hyperparams: more folds than samples");

    SelectionResult result;
    if (grid.size() == 1) {
        result.best = grid[0];
        result.cv_mse.assign(1, 0.0);
        return result;
    }

    const std::vector<int> fold = fold_assignment(X.rows, folds, derive_seed(seed, "cv-folds"));
    result.cv_mse.assign(grid.size(), 0.0);
    for (size_t g = 0; g < grid.size(); ++g) {
        double total_sq = 0.0;
        for (int f = 0; f < folds; ++f) {
            std::vector<size_t> tr, te;
            for (size_t i = 0; i < X.rows; ++i) (fold[i] == f ? te : tr).push_back(i);
            DMatrix Xtr(tr.size(), X.cols), Xte(te.size(), X.cols);
            std::vector<double> ytr(tr.size());
            for (size_t i = 0; i < tr.size(); ++i) {
                std::copy(X.row(tr[i]), X.row(tr[i]) + X.cols, Xtr.row(i));
                ytr[i] = y[tr[i]];
            }
            for (size_t i = 0; i < te.size(); ++i)
                std::copy(X.row(te[i]), X.row(te[i]) + X.cols, Xte.row(i));
            FittedRegressor m = fit(kind, Xtr, ytr, grid[g], derive_seed(seed, "cv-fit", g * 64 + f));
            std::vector<double> pred = m.predict(Xte);
            for (size_t i = 0; i < te.size(); ++i) {
                const double e = pred[i] - y[te[i]];
                total_sq += e * e;
            }
        }
        result.cv_mse[g] = total_sq / static_cast<double>(X.rows);
    }
    result.best_index = 0;
    for (size_t g = 1; g < grid.size(); ++g)
        if (result.cv_mse[g] < result.cv_mse[result.best_index]) result.best_index = g;
    result.best = grid[result.best_index];
    return result;
}

// Search grids used by the top-level models.
inline std::vector<HyperParams> default_grid(RegressorKind kind) {
    std::vector<HyperParams> grid;
    HyperParams base;
    switch (kind) {
        case RegressorKind::LeastSquares:
            grid.push_back(base);
            break;
        case RegressorKind::Ridge:
            for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
                base.ridge_lambda = lambda;
                grid.push_back(base);
            }
            break;
        case RegressorKind::SvrRbf:
            for (double c : {0.1, 1.0, 10.0})
                for (double gamma : {0.01, 0.1, 1.0}) {
                    base.svr_c = c;
                    base.svr_gamma = gamma;
                    base.svr_epsilon = 0.1;
                    grid.push_back(base);
                }
            break;
        case RegressorKind::RandomForest:
            for (double ff : {0.3, 0.6, 1.0}) {
                base.rf_trees = 500;
                base.rf_feature_fraction = ff;
                grid.push_back(base);
            }
            break;
        case RegressorKind::GradientBoosting:
            for (int depth : {2, 3}) {
                base.gb_trees = 500;
                base.gb_max_depth = depth;
                base.gb_learning_rate = 0.05;
                base.gb_subsample = 0.8;
                grid.push_back(base);
            }
            break;
    }
    return grid;
}

}  // namespace sas
