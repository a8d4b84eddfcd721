#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <thread>
#include <vector>

#include "sas/rng.hpp"

namespace sas {

// Row-major dense matrix, the working representation for all learners.
struct DMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    DMatrix() = default;
    DMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(size_t i) { return data.data() + i * cols; }
    const double* row(size_t i) const { return data.data() + i * cols; }
    double& at(size_t i, size_t j) { return data[i * cols + j]; }
    double at(size_t i, size_t j) const { return data[i * cols + j]; }
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct TreeParams {
    int max_depth = 25;
    int min_leaf = 1;
    double feature_fraction = 1.0;
};

class RegressionTree {
   public:
    std::vector<TreeNode> nodes;

    double predict_row(const double* x) const {
        int i = 0;
        while (nodes[i].feature >= 0)
            i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }
};

namespace detail {

struct TreeBuilder {
    const DMatrix& X;
    const std::vector<double>& y;
    TreeParams params;
    Rng& rng;
    RegressionTree tree;
    std::vector<int> samples;  // partitioned in place during growth
    std::vector<int> feature_pool;
    std::vector<std::pair<double, double>> scratch;  // (feature value, target)

    TreeBuilder(const DMatrix& X, const std::vector<double>& y, std::vector<int> rows,
                const TreeParams& p, Rng& rng)
        : X(X), y(y), params(p), rng(rng), samples(std::move(rows)) {
        feature_pool.resize(X.cols);
        for (size_t f = 0; f < X.cols; ++f) feature_pool[f] = static_cast<int>(f);
    }

    int build(int begin, int end, int depth) {
        const int n = end - begin;
        double sum = 0.0;
        for (int i = begin; i < end; ++i) sum += y[samples[i]];
        const double mean = sum / n;

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[node_id].value = mean;
        if (depth >= params.max_depth || n < 2 * params.min_leaf) return node_id;

        bool constant = true;
        for (int i = begin + 1; i < end && constant; ++i)
            constant = y[samples[i]] == y[samples[begin]];
        if (constant) return node_id;

        int n_feats = static_cast<int>(
            std::max<size_t>(1, static_cast<size_t>(params.feature_fraction * X.cols)));
        n_feats = std::min<int>(n_feats, static_cast<int>(X.cols));
        for (int k = 0; k < n_feats; ++k) {
            const size_t j = k + rng.bounded(feature_pool.size() - k);
            std::swap(feature_pool[k], feature_pool[j]);
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = -1.0;  // gain proxy: sum_l^2/n_l + sum_r^2/n_r - sum^2/n
        for (int k = 0; k < n_feats; ++k) {
            const int f = feature_pool[k];
            scratch.clear();
            for (int i = begin; i < end; ++i)
                scratch.emplace_back(X.at(samples[i], f), y[samples[i]]);
            std::sort(scratch.begin(), scratch.end());
            if (scratch.front().first == scratch.back().first) continue;
            double left_sum = 0.0;
            for (int i = 0; i < n - 1; ++i) {
                left_sum += scratch[i].second;
                if (scratch[i].first == scratch[i + 1].first) continue;
                const int nl = i + 1, nr = n - nl;
                if (nl < params.min_leaf || nr < params.min_leaf) continue;
                const double right_sum = sum - left_sum;
                const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
                if (score > best_score) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
                }
            }
        }
        if (best_feature < 0 || best_score <= sum * sum / n) return node_id;

        auto mid_it = std::partition(samples.begin() + begin, samples.begin() + end,
                                     [&](int r) { return X.at(r, best_feature) <= best_threshold; });
        const int mid = static_cast<int>(mid_it - samples.begin());
        if (mid == begin || mid == end) return node_id;

        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        const int left = build(begin, mid, depth + 1);
        tree.nodes[node_id].left = left;
        const int right = build(mid, end, depth + 1);
        tree.nodes[node_id].right = right;
        return node_id;
    }
};

// Deterministic parallel map: item i is computed from its own derived state,
// so the result is identical for any worker count.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn, size_t workers = 0) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futures;
    for (size_t w = 0; w < workers; ++w)
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (size_t i = w; i < n; i += workers) fn(i);
        }));
    for (auto& f : futures) f.get();
}

}  // namespace detail

inline RegressionTree fit_tree(const DMatrix& X, const std::vector<double>& y,
                               std::vector<int> rows, const TreeParams& params, Rng& rng) {
    detail::TreeBuilder builder(X, y, std::move(rows), params, rng);
    builder.build(0, static_cast<int>(builder.samples.size()), 0);
    return std::move(builder.tree);
}

struct ForestModel {
    std::vector<RegressionTree> trees;
    double oob_mse = 0.0;

    // exact mean of per-tree predictions, summed in tree order
    double predict_row(const double* x) const {
        double sum = 0.0;
        for (const auto& t : trees) sum += t.predict_row(x);
        return sum / static_cast<double>(trees.size());
    }
};

inline ForestModel fit_forest(const DMatrix& X, const std::vector<double>& y, int n_trees,
                              const TreeParams& params, uint64_t seed, size_t workers = 0) {
    const size_t n = X.rows;
    ForestModel model;
    model.trees.resize(n_trees);
    std::vector<std::vector<int>> bags(n_trees);
    detail::parallel_for(
        n_trees,
        [&](size_t b) {
            Rng rng(derive_seed(seed, "rf-tree", b));
            std::vector<int> rows(n);
            for (size_t i = 0; i < n; ++i) rows[i] = static_cast<int>(rng.bounded(n));
            bags[b] = rows;
            model.trees[b] = fit_tree(X, y, std::move(rows), params, rng);
        },
        workers);

    // out-of-bag error, for diagnostics
    std::vector<double> oob_sum(n, 0.0);
    std::vector<int> oob_count(n, 0);
    std::vector<char> in_bag(n);
    for (int b = 0; b < n_trees; ++b) {
        std::fill(in_bag.begin(), in_bag.end(), 0);
        for (int r : bags[b]) in_bag[r] = 1;
        for (size_t i = 0; i < n; ++i)
            if (!in_bag[i]) {
                oob_sum[i] += model.trees[b].predict_row(X.row(i));
                ++oob_count[i];
            }
    }
    double mse = 0.0;
    size_t covered = 0;
    for (size_t i = 0; i < n; ++i) {
        if (oob_count[i] == 0) continue;
        const double e = oob_sum[i] / oob_count[i] - y[i];
        mse += e * e;
        ++covered;
    }
    model.oob_mse = covered > 0 ? mse / static_cast<double>(covered) : 0.0;
    return model;
}

struct GbmModel {
    double init = 0.0;
    double learning_rate = 0.05;
    std::vector<RegressionTree> trees;
    std::vector<double> train_mse;  // after each round

    double predict_row(const double* x) const {
        double f = init;
        for (const auto& t : trees) f += learning_rate * t.predict_row(x);
        return f;
    }
};

inline GbmModel fit_gbm(const DMatrix& X, const std::vector<double>& y, int rounds, int max_depth,
                        double learning_rate, double subsample, uint64_t seed) {
    const size_t n = X.rows;
    GbmModel model;
    model.learning_rate = learning_rate;
    double sum = 0.0;
    for (double v : y) sum += v;
    model.init = sum / static_cast<double>(n);

    std::vector<double> f(n, model.init);
    std::vector<double> residual(n);
    TreeParams params;
    params.max_depth = max_depth;
    params.min_leaf = 3;
    params.feature_fraction = 1.0;

    std::vector<int> all_rows(n);
    for (size_t i = 0; i < n; ++i) all_rows[i] = static_cast<int>(i);

    for (int t = 0; t < rounds; ++t) {
        for (size_t i = 0; i < n; ++i) residual[i] = y[i] - f[i];
        Rng rng(derive_seed(seed, "gbm-round", t));
        std::vector<int> rows;
        if (subsample >= 1.0) {
            rows = all_rows;
        } else {
            std::vector<int> shuffled = all_rows;
            rng.shuffle(shuffled);
            const size_t m = std::max<size_t>(1, static_cast<size_t>(subsample * n));
            rows.assign(shuffled.begin(), shuffled.begin() + m);
            std::sort(rows.begin(), rows.end());
        }
        RegressionTree tree = fit_tree(X, residual, std::move(rows), params, rng);
        for (size_t i = 0; i < n; ++i) f[i] += learning_rate * tree.predict_row(X.row(i));
        model.trees.push_back(std::move(tree));
        double mse = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double e = y[i] - f[i];
            mse += e * e;
        }
        model.train_mse.push_back(mse / static_cast<double>(n));
    }
    return model;
}

}  // namespace sas
