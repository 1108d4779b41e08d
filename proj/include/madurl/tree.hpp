#pragma once

#include <span>
#include <vector>

#include "madurl/common.hpp"
#include "madurl/dataset.hpp"

namespace madurl {

struct SingleClass : Error {
    SingleClass() : Error("training data contains a single class") {}
};

// Row-major feature matrix.
struct Matrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : n_rows(rows), n_cols(cols), data(rows * cols, 0.0) {}

    double operator()(std::size_t i, std::size_t j) const { return data[i * n_cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * n_cols + j]; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data.data() + i * n_cols, n_cols);
    }
};

Matrix to_matrix(const LabeledDataset& d);
std::vector<int> labels_of(const LabeledDataset& d);

struct TreeNode {
    int split_slot = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> values;  // leaf payload: class scores or a single regression value
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int max_depth = 0;

    const std::vector<double>& predict_leaf(std::span<const double> x) const {
        int i = 0;
        while (nodes[i].split_slot >= 0)
            i = x[static_cast<std::size_t>(nodes[i].split_slot)] <= nodes[i].threshold
                    ? nodes[i].left
                    : nodes[i].right;
        return nodes[i].values;
    }
};

struct CartParams {
    int max_depth = 10;
    int min_leaf = 1;
    int max_features = -1;  // -1 = consider every feature at each split
};

// Greedy weighted-Gini classification tree. Ties between candidate splits
// break toward the lowest slot index, then the lowest threshold, so the
// result does not depend on evaluation order. `feature_rng` drives per-split
// feature subsampling when max_features is set.
DecisionTree train_cart(const Matrix& x, const std::vector<int>& y,
                        const std::vector<double>& sample_weights,
                        const std::vector<std::size_t>& rows, const CartParams& params,
                        Rng* feature_rng = nullptr);

struct GradTreeParams {
    int max_depth = 3;
    int min_leaf = 1;
    double lambda = 0.0;  // leaf-weight shrinkage
    double gamma = 0.0;   // split-gain penalty
};

// Second-order regression tree: splits maximize
//   [GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)] / 2 - gamma
// over (split_g, split_h); leaf values are -G/(H+lambda) over (leaf_g, leaf_h).
// Plain squared-error fitting is the special case split_h = 1, lambda = 0.
DecisionTree train_grad_tree(const Matrix& x, const std::vector<double>& split_g,
                             const std::vector<double>& split_h,
                             const std::vector<double>& leaf_g,
                             const std::vector<double>& leaf_h,
                             const std::vector<std::size_t>& rows, const GradTreeParams& params);

double regularized_leaf_weight(double grad_sum, double hess_sum, double lambda);

}  // namespace madurl
