#include "madurl/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "madurl/parallel.hpp"

namespace madurl {

Matrix to_matrix(const LabeledDataset& d) {
    if (!d.has_features()) throw NoFeatures{};
    Matrix m(d.rows.size(), d.rows.empty() ? 0 : d.rows[0].features->values.size());
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const auto& v = d.rows[i].features->values;
        if (v.size() != m.n_cols) throw SchemaMismatch("ragged feature rows");
        std::copy(v.begin(), v.end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * m.n_cols));
    }
    return m;
}

std::vector<int> labels_of(const LabeledDataset& d) {
    std::vector<int> y;
    y.reserve(d.rows.size());
    for (const auto& r : d.rows) y.push_back(r.label);
    return y;
}

double regularized_leaf_weight(double grad_sum, double hess_sum, double lambda) {
    const double denom = hess_sum + lambda;
    if (denom <= 0.0) return 0.0;
    return -grad_sum / denom;
}

namespace {

struct BestSplit {
    double gain = -std::numeric_limits<double>::infinity();
    int slot = std::numeric_limits<int>::max();
    double threshold = std::numeric_limits<double>::infinity();

    bool better_than(const BestSplit& o) const {
        if (gain != o.gain) return gain > o.gain;
        if (slot != o.slot) return slot < o.slot;
        return threshold < o.threshold;
    }
    bool valid() const { return std::isfinite(gain); }
};

// Candidate feature slots for one split: every slot, or a seeded subsample.
// Returned sorted so the tie-break order is canonical.
std::vector<int> candidate_slots(std::size_t n_cols, int max_features, Rng* rng) {
    std::vector<int> slots(n_cols);
    for (std::size_t j = 0; j < n_cols; ++j) slots[j] = static_cast<int>(j);
    if (max_features > 0 && static_cast<std::size_t>(max_features) < n_cols && rng) {
        for (int j = 0; j < max_features; ++j) {
            const std::size_t pick = j + rng->uniform_int(n_cols - j);
            std::swap(slots[j], slots[pick]);
        }
        slots.resize(static_cast<std::size_t>(max_features));
        std::sort(slots.begin(), slots.end());
    }
    return slots;
}

template <class EvalFeature>
BestSplit search_features(const std::vector<int>& slots, std::size_t node_rows,
                          EvalFeature&& eval) {
    std::vector<BestSplit> per_slot(slots.size());
    const bool big = node_rows * slots.size() >= 8192;
    if (big) {
        parallel_for(slots.size(), [&](std::size_t c) { per_slot[c] = eval(slots[c]); });
    } else {
        for (std::size_t c = 0; c < slots.size(); ++c) per_slot[c] = eval(slots[c]);
    }
    BestSplit best;
    for (const auto& s : per_slot)
        if (s.valid() && s.better_than(best)) best = s;
    return best;
}

struct SortedValue {
    double value;
    std::size_t row;
};

void gather_sorted(const Matrix& x, const std::vector<std::size_t>& rows, int slot,
                   std::vector<SortedValue>& out) {
    out.clear();
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back({x(r, static_cast<std::size_t>(slot)), r});
    std::sort(out.begin(), out.end(), [](const SortedValue& a, const SortedValue& b) {
        return a.value < b.value;
    });
}

// ---------------------------------------------------------------------------
// Classification (weighted Gini)
// ---------------------------------------------------------------------------

struct CartBuilder {
    const Matrix& x;
    const std::vector<int>& y;
    const std::vector<double>& w;
    const CartParams& params;
    Rng* rng;
    DecisionTree tree;

    static double gini(double w0, double w1) {
        const double total = w0 + w1;
        if (total <= 0.0) return 0.0;
        return 1.0 - (w0 * w0 + w1 * w1) / (total * total);
    }

    BestSplit eval_slot(const std::vector<std::size_t>& rows, int slot, double pw0, double pw1) const {
        std::vector<SortedValue> sorted;
        gather_sorted(x, rows, slot, sorted);
        const double total = pw0 + pw1;
        const double parent = gini(pw0, pw1);
        BestSplit best;
        double l0 = 0, l1 = 0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            const std::size_t r = sorted[i].row;
            if (y[r] == 0) l0 += w[r];
            else l1 += w[r];
            if (sorted[i].value == sorted[i + 1].value) continue;
            const std::size_t left_n = i + 1, right_n = sorted.size() - left_n;
            if (left_n < static_cast<std::size_t>(params.min_leaf) ||
                right_n < static_cast<std::size_t>(params.min_leaf))
                continue;
            const double r0 = pw0 - l0, r1 = pw1 - l1;
            const double wl = l0 + l1, wr = r0 + r1;
            const double gain =
                parent - (total > 0 ? (wl / total) * gini(l0, l1) + (wr / total) * gini(r0, r1) : 0.0);
            const double threshold = sorted[i].value + 0.5 * (sorted[i + 1].value - sorted[i].value);
            BestSplit cand{gain, slot, threshold};
            if (gain > 0.0 && cand.better_than(best)) best = cand;
        }
        return best;
    }

    int build(const std::vector<std::size_t>& rows, int depth) {
        double w0 = 0, w1 = 0;
        for (std::size_t r : rows) (y[r] == 0 ? w0 : w1) += w[r];
        const double total = w0 + w1;

        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[idx].values = total > 0 ? std::vector<double>{w0 / total, w1 / total}
                                           : std::vector<double>{0.5, 0.5};
        tree.max_depth = std::max(tree.max_depth, depth);

        if (depth >= params.max_depth || rows.size() < 2 * static_cast<std::size_t>(params.min_leaf) ||
            w0 == 0.0 || w1 == 0.0)
            return idx;

        const auto slots = candidate_slots(x.n_cols, params.max_features, rng);
        const BestSplit best = search_features(slots, rows.size(), [&](int slot) {
            return eval_slot(rows, slot, w0, w1);
        });
        if (!best.valid()) return idx;

        std::vector<std::size_t> left, right;
        left.reserve(rows.size());
        right.reserve(rows.size());
        for (std::size_t r : rows)
            (x(r, static_cast<std::size_t>(best.slot)) <= best.threshold ? left : right).push_back(r);
        if (left.empty() || right.empty()) return idx;

        tree.nodes[idx].split_slot = best.slot;
        tree.nodes[idx].threshold = best.threshold;
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        tree.nodes[idx].left = l;
        tree.nodes[idx].right = r;
        return idx;
    }
};

// ---------------------------------------------------------------------------
// Second-order regression
// ---------------------------------------------------------------------------

struct GradBuilder {
    const Matrix& x;
    const std::vector<double>& sg;  // split gradients
    const std::vector<double>& sh;  // split hessians
    const std::vector<double>& lg;  // leaf gradients
    const std::vector<double>& lh;  // leaf hessians
    const GradTreeParams& params;
    DecisionTree tree;

    double score(double g, double h) const {
        const double denom = h + params.lambda;
        return denom > 0.0 ? g * g / denom : 0.0;
    }

    BestSplit eval_slot(const std::vector<std::size_t>& rows, int slot, double pg, double ph) const {
        std::vector<SortedValue> sorted;
        gather_sorted(x, rows, slot, sorted);
        const double parent = score(pg, ph);
        BestSplit best;
        double gl = 0, hl = 0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            const std::size_t r = sorted[i].row;
            gl += sg[r];
            hl += sh[r];
            if (sorted[i].value == sorted[i + 1].value) continue;
            const std::size_t left_n = i + 1, right_n = sorted.size() - left_n;
            if (left_n < static_cast<std::size_t>(params.min_leaf) ||
                right_n < static_cast<std::size_t>(params.min_leaf))
                continue;
            const double gain =
                0.5 * (score(gl, hl) + score(pg - gl, ph - hl) - parent) - params.gamma;
            const double threshold = sorted[i].value + 0.5 * (sorted[i + 1].value - sorted[i].value);
            BestSplit cand{gain, slot, threshold};
            if (gain > 0.0 && cand.better_than(best)) best = cand;
        }
        return best;
    }

    int build(const std::vector<std::size_t>& rows, int depth) {
        double pg = 0, ph = 0, leaf_g = 0, leaf_h = 0;
        for (std::size_t r : rows) {
            pg += sg[r];
            ph += sh[r];
            leaf_g += lg[r];
            leaf_h += lh[r];
        }
        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[idx].values = {regularized_leaf_weight(leaf_g, leaf_h, params.lambda)};
        tree.max_depth = std::max(tree.max_depth, depth);

        if (depth >= params.max_depth || rows.size() < 2 * static_cast<std::size_t>(params.min_leaf))
            return idx;

        std::vector<int> slots(x.n_cols);
        for (std::size_t j = 0; j < x.n_cols; ++j) slots[j] = static_cast<int>(j);
        const BestSplit best = search_features(slots, rows.size(), [&](int slot) {
            return eval_slot(rows, slot, pg, ph);
        });
        if (!best.valid()) return idx;

        std::vector<std::size_t> left, right;
        left.reserve(rows.size());
        right.reserve(rows.size());
        for (std::size_t r : rows)
            (x(r, static_cast<std::size_t>(best.slot)) <= best.threshold ? left : right).push_back(r);
        if (left.empty() || right.empty()) return idx;

        tree.nodes[idx].split_slot = best.slot;
        tree.nodes[idx].threshold = best.threshold;
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        tree.nodes[idx].left = l;
        tree.nodes[idx].right = r;
        return idx;
    }
};

}  // namespace

DecisionTree train_cart(const Matrix& x, const std::vector<int>& y,
                        const std::vector<double>& sample_weights,
                        const std::vector<std::size_t>& rows, const CartParams& params,
                        Rng* feature_rng) {
    if (rows.size() < 1) throw Error("train_cart: no rows");
    if (y.size() != x.n_rows || sample_weights.size() != x.n_rows)
        throw Error("train_cart: shape mismatch");
    double wsum = 0;
    for (std::size_t r : rows) {
        if (sample_weights[r] < 0) throw Error("train_cart: negative weight");
        wsum += sample_weights[r];
    }
    if (wsum <= 0) throw Error("train_cart: weights sum to zero");

    CartBuilder builder{x, y, sample_weights, params, feature_rng, {}};
    builder.build(rows, 0);
    return std::move(builder.tree);
}

DecisionTree train_grad_tree(const Matrix& x, const std::vector<double>& split_g,
                             const std::vector<double>& split_h,
                             const std::vector<double>& leaf_g,
                             const std::vector<double>& leaf_h,
                             const std::vector<std::size_t>& rows, const GradTreeParams& params) {
    if (rows.empty()) throw Error("train_grad_tree: no rows");
    GradBuilder builder{x, split_g, split_h, leaf_g, leaf_h, params, {}};
    builder.build(rows, 0);
    return std::move(builder.tree);
}

}  // namespace madurl
