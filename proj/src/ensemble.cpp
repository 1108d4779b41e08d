#include "madurl/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "madurl/parallel.hpp"

namespace madurl {

using nlohmann::json;

EnsembleKind ensemble_kind_from_string(const std::string& s) {
    if (s == "random_forest") return EnsembleKind::RandomForest;
    if (s == "adaboost") return EnsembleKind::AdaBoost;
    if (s == "gradient_boost") return EnsembleKind::GradientBoost;
    if (s == "regularized_boost") return EnsembleKind::RegularizedBoost;
    throw Error("unknown ensemble kind: " + s);
}

std::string to_string(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::RandomForest: return "random_forest";
        case EnsembleKind::AdaBoost: return "adaboost";
        case EnsembleKind::GradientBoost: return "gradient_boost";
        case EnsembleKind::RegularizedBoost: return "regularized_boost";
    }
    return "?";
}

const std::vector<EnsembleKind>& all_ensemble_kinds() {
    static const std::vector<EnsembleKind> kinds = {
        EnsembleKind::RandomForest, EnsembleKind::AdaBoost, EnsembleKind::GradientBoost,
        EnsembleKind::RegularizedBoost};
    return kinds;
}

namespace {

void require_two_classes(const std::vector<int>& y) {
    bool has0 = false, has1 = false;
    for (int v : y) (v == 0 ? has0 : has1) = true;
    if (!has0 || !has1) throw SingleClass{};
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
}

int resolve_max_features(int requested, std::size_t n_cols) {
    if (requested == 0)
        return std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n_cols))));
    if (requested < 0) return -1;
    return std::min(requested, static_cast<int>(n_cols));
}

}  // namespace

std::array<double, 2> EnsembleModel::predict_proba(std::span<const double> v) const {
    if (v.size() != n_features) throw SchemaMismatch("vector width != model width");
    double p1 = 0.5;
    switch (kind) {
        case EnsembleKind::RandomForest: {
            if (!trees.empty()) {
                double acc = 0.0;
                for (const auto& t : trees) acc += t.predict_leaf(v)[1];
                p1 = acc / static_cast<double>(trees.size());
            }
            break;
        }
        case EnsembleKind::AdaBoost: {
            double vote1 = 0.0, total = 0.0;
            for (std::size_t t = 0; t < trees.size(); ++t) {
                const auto& scores = trees[t].predict_leaf(v);
                total += tree_weights[t];
                if (scores[1] > scores[0]) vote1 += tree_weights[t];
            }
            p1 = total > 0 ? vote1 / total : 0.5;
            break;
        }
        case EnsembleKind::GradientBoost:
        case EnsembleKind::RegularizedBoost: {
            double f = base_score;
            for (std::size_t t = 0; t < trees.size(); ++t)
                f += tree_weights[t] * trees[t].predict_leaf(v)[0];
            p1 = sigmoid(f);
            break;
        }
    }
    p1 = clamp_prob(p1);
    return {1.0 - p1, p1};
}

int EnsembleModel::predict(std::span<const double> v) const {
    const auto p = predict_proba(v);
    return p[1] > p[0] ? 1 : 0;
}

std::vector<std::array<double, 2>> predict_proba_batch(const EnsembleModel& m, const Matrix& x) {
    std::vector<std::array<double, 2>> out(x.n_rows);
    parallel_for(x.n_rows, [&](std::size_t i) { out[i] = m.predict_proba(x.row(i)); });
    return out;
}

// ---------------------------------------------------------------------------
// Trainers
// ---------------------------------------------------------------------------

EnsembleModel train_random_forest(const Matrix& x, const std::vector<int>& y,
                                  const TrainOptions& opts) {
    require_two_classes(y);
    EnsembleModel m;
    m.kind = EnsembleKind::RandomForest;
    m.options = opts;
    m.n_features = x.n_cols;
    m.trees.resize(static_cast<std::size_t>(opts.n_estimators));
    m.tree_weights.assign(static_cast<std::size_t>(opts.n_estimators), 1.0);

    const std::vector<double> weights(x.n_rows, 1.0);
    const int max_features = resolve_max_features(opts.max_features, x.n_cols);

    // Each tree owns an rng derived from (seed, tree index): the forest is
    // identical however the tree loop is scheduled.
    parallel_for(m.trees.size(), [&](std::size_t t) {
        Rng rng(derive_seed(opts.seed, "rf/tree", t));
        std::vector<std::size_t> bootstrap(x.n_rows);
        for (auto& r : bootstrap) r = rng.uniform_int(x.n_rows);
        std::sort(bootstrap.begin(), bootstrap.end());
        CartParams params{opts.max_depth, 1, max_features};
        m.trees[t] = train_cart(x, y, weights, bootstrap, params, &rng);
    });
    return m;
}

EnsembleModel train_adaboost(const Matrix& x, const std::vector<int>& y, const TrainOptions& opts) {
    require_two_classes(y);
    EnsembleModel m;
    m.kind = EnsembleKind::AdaBoost;
    m.options = opts;
    m.n_features = x.n_cols;

    const auto rows = all_rows(x.n_rows);
    std::vector<double> w(x.n_rows, 1.0 / static_cast<double>(x.n_rows));
    const CartParams params{opts.base_depth, 1, -1};

    for (int round = 0; round < opts.n_estimators; ++round) {
        DecisionTree tree = train_cart(x, y, w, rows, params, nullptr);
        double err = 0.0;
        std::vector<char> wrong(x.n_rows, 0);
        for (std::size_t i = 0; i < x.n_rows; ++i) {
            const auto& scores = tree.predict_leaf(x.row(i));
            const int pred = scores[1] > scores[0] ? 1 : 0;
            if (pred != y[i]) {
                wrong[i] = 1;
                err += w[i];
            }
        }

        if (err <= 0.0) {
            // Perfect learner: keep it with a capped weight and stop.
            m.trees.push_back(std::move(tree));
            m.tree_weights.push_back(std::log((1.0 - 1e-12) / 1e-12));
            break;
        }
        if (err >= 0.5) {
            if (m.trees.empty()) {  // keep the model usable even on this edge
                m.trees.push_back(std::move(tree));
                m.tree_weights.push_back(1e-3);
            }
            break;
        }

        const double alpha = std::log((1.0 - err) / err);
        m.trees.push_back(std::move(tree));
        m.tree_weights.push_back(alpha);

        // Misclassified rows are promoted by (1-err)/err, then the weights
        // are renormalized back into a distribution.
        double sum = 0.0;
        for (std::size_t i = 0; i < x.n_rows; ++i) {
            if (wrong[i]) w[i] *= std::exp(alpha);
            sum += w[i];
        }
        for (auto& wi : w) wi /= sum;
    }
    return m;
}

namespace {

double logistic_loss(const std::vector<double>& f, const std::vector<int>& y) {
    double loss = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double p = clamp_prob(sigmoid(f[i]));
        loss -= y[i] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return loss / static_cast<double>(f.size());
}

EnsembleModel train_boosted(EnsembleKind kind, const Matrix& x, const std::vector<int>& y,
                            const TrainOptions& opts) {
    require_two_classes(y);
    EnsembleModel m;
    m.kind = kind;
    m.options = opts;
    m.n_features = x.n_cols;

    const bool regularized = kind == EnsembleKind::RegularizedBoost;
    if (!regularized) {
        double p1 = 0.0;
        for (int v : y) p1 += v;
        p1 = clamp_prob(p1 / static_cast<double>(y.size()));
        m.base_score = std::log(p1 / (1.0 - p1));  // class-prior log-odds
    }

    const auto rows = all_rows(x.n_rows);
    std::vector<double> f(x.n_rows, m.base_score);
    std::vector<double> split_g(x.n_rows), split_h(x.n_rows), leaf_g(x.n_rows), leaf_h(x.n_rows);
    GradTreeParams params;
    params.max_depth = std::clamp(opts.boost_depth, 1, 5);
    params.lambda = regularized ? opts.lambda : 0.0;
    params.gamma = regularized ? opts.gamma : 0.0;

    m.training_loss.push_back(logistic_loss(f, y));
    for (int round = 0; round < opts.n_estimators; ++round) {
        for (std::size_t i = 0; i < x.n_rows; ++i) {
            const double p = sigmoid(f[i]);
            const double g = p - static_cast<double>(y[i]);  // d(logloss)/df
            const double h = std::max(p * (1.0 - p), 1e-12);
            leaf_g[i] = g;
            leaf_h[i] = h;
            if (regularized) {
                split_g[i] = g;
                split_h[i] = h;
            } else {
                // Plain gradient boosting grows squared-error trees on the
                // negative gradient; the Newton leaf step comes from (g, h).
                split_g[i] = -g;
                split_h[i] = 1.0;
            }
        }
        DecisionTree tree = train_grad_tree(x, split_g, split_h, leaf_g, leaf_h, rows, params);
        for (std::size_t i = 0; i < x.n_rows; ++i)
            f[i] += opts.learning_rate * tree.predict_leaf(x.row(i))[0];
        m.trees.push_back(std::move(tree));
        m.tree_weights.push_back(opts.learning_rate);
        m.training_loss.push_back(logistic_loss(f, y));
    }
    return m;
}

}  // namespace

EnsembleModel train_gradient_boost(const Matrix& x, const std::vector<int>& y,
                                   const TrainOptions& opts) {
    return train_boosted(EnsembleKind::GradientBoost, x, y, opts);
}

EnsembleModel train_regularized_boost(const Matrix& x, const std::vector<int>& y,
                                      const TrainOptions& opts) {
    return train_boosted(EnsembleKind::RegularizedBoost, x, y, opts);
}

EnsembleModel train_ensemble(EnsembleKind kind, const Matrix& x, const std::vector<int>& y,
                             const TrainOptions& opts) {
    switch (kind) {
        case EnsembleKind::RandomForest: return train_random_forest(x, y, opts);
        case EnsembleKind::AdaBoost: return train_adaboost(x, y, opts);
        case EnsembleKind::GradientBoost: return train_gradient_boost(x, y, opts);
        case EnsembleKind::RegularizedBoost: return train_regularized_boost(x, y, opts);
    }
    throw Error("unreachable ensemble kind");
}

EnsembleModel train_ensemble(EnsembleKind kind, const LabeledDataset& d, const TrainOptions& opts) {
    EnsembleModel m = train_ensemble(kind, to_matrix(d), labels_of(d), opts);
    if (m.n_features == static_cast<std::size_t>(kFeatureSlots)) m.schema_hash = feature_schema_hash();
    return m;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json tree_to_json(const DecisionTree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        if (n.split_slot < 0) nodes.push_back(json{{"leaf", n.values}});
        else
            nodes.push_back(json{{"slot", n.split_slot},
                                 {"thr", n.threshold},
                                 {"l", n.left},
                                 {"r", n.right}});
    }
    return json{{"max_depth", t.max_depth}, {"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const json& j) {
    DecisionTree t;
    t.max_depth = j.value("max_depth", 0);
    for (const auto& n : j.at("nodes")) {
        TreeNode node;
        if (n.contains("leaf")) {
            node.values = n["leaf"].get<std::vector<double>>();
        } else {
            node.split_slot = n.at("slot").get<int>();
            node.threshold = n.at("thr").get<double>();
            node.left = n.at("l").get<int>();
            node.right = n.at("r").get<int>();
        }
        t.nodes.push_back(std::move(node));
    }
    return t;
}

}  // namespace

json EnsembleModel::to_json() const {
    json trees_json = json::array();
    for (const auto& t : trees) trees_json.push_back(tree_to_json(t));
    return json{{"kind", madurl::to_string(kind)},
                {"n_estimators", n_estimators()},
                {"base_score", base_score},
                {"n_features", n_features},
                {"schema_hash", schema_hash},
                {"seed", options.seed},
                {"hyperparameters",
                 {{"max_depth", options.max_depth},
                  {"base_depth", options.base_depth},
                  {"boost_depth", options.boost_depth},
                  {"learning_rate", options.learning_rate},
                  {"lambda", options.lambda},
                  {"gamma", options.gamma},
                  {"max_features", options.max_features}}},
                {"tree_weights", tree_weights},
                {"training_loss", training_loss},
                {"trees", std::move(trees_json)}};
}

EnsembleModel EnsembleModel::from_json(const json& j) {
    EnsembleModel m;
    m.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
    m.base_score = j.value("base_score", 0.0);
    m.n_features = j.at("n_features").get<std::size_t>();
    m.schema_hash = j.value("schema_hash", 0ull);
    m.options.seed = j.value("seed", 0ull);
    const auto& h = j.at("hyperparameters");
    m.options.max_depth = h.value("max_depth", 10);
    m.options.base_depth = h.value("base_depth", 2);
    m.options.boost_depth = h.value("boost_depth", 3);
    m.options.learning_rate = h.value("learning_rate", 0.1);
    m.options.lambda = h.value("lambda", 1.0);
    m.options.gamma = h.value("gamma", 0.0);
    m.options.max_features = h.value("max_features", 0);
    m.tree_weights = j.at("tree_weights").get<std::vector<double>>();
    m.training_loss = j.value("training_loss", std::vector<double>{});
    for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t));
    m.options.n_estimators = m.n_estimators();
    return m;
}

void EnsembleModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model: " + path);
    out << to_json().dump(1) << "\n";
}

EnsembleModel EnsembleModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model: " + path);
    json j = json::parse(in);
    return from_json(j);
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

GridSearchResult grid_search(const LabeledDataset& d, EnsembleKind kind,
                             const std::vector<int>& grid, int folds, const TrainOptions& base,
                             std::uint64_t seed) {
    if (folds != 5 && folds != 10) throw Error("grid_search: folds must be 5 or 10");
    const Matrix x = to_matrix(d);
    const std::vector<int> y = labels_of(d);
    const auto fold_idx = kfold(d, folds, derive_seed(seed, "grid/folds"));

    GridSearchResult result;
    for (int n : grid) {
        double acc_sum = 0.0;
        for (std::size_t f = 0; f < fold_idx.size(); ++f) {
            std::vector<char> in_test(x.n_rows, 0);
            for (std::size_t i : fold_idx[f]) in_test[i] = 1;
            LabeledDataset train;
            train.name = d.name;
            for (std::size_t i = 0; i < d.rows.size(); ++i)
                if (!in_test[i]) train.rows.push_back(d.rows[i]);

            TrainOptions opts = base;
            opts.n_estimators = n;
            opts.seed = derive_seed(seed, "grid/train", f);
            const EnsembleModel m = train_ensemble(kind, to_matrix(train), labels_of(train), opts);

            std::size_t correct = 0;
            for (std::size_t i : fold_idx[f])
                if (m.predict(x.row(i)) == y[i]) ++correct;
            acc_sum += fold_idx[f].empty()
                           ? 0.0
                           : static_cast<double>(correct) / static_cast<double>(fold_idx[f].size());
        }
        result.table.push_back({n, acc_sum / static_cast<double>(fold_idx.size())});
    }

    const auto best = std::max_element(
        result.table.begin(), result.table.end(), [](const auto& a, const auto& b) {
            if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy < b.mean_accuracy;
            return a.n_estimators > b.n_estimators;  // tie -> smaller n_estimators wins
        });
    result.best_n_estimators = best->n_estimators;
    result.best_accuracy = best->mean_accuracy;

    TrainOptions opts = base;
    opts.n_estimators = result.best_n_estimators;
    opts.seed = derive_seed(seed, "grid/final");
    result.best_model = train_ensemble(kind, x, y, opts);
    return result;
}

}  // namespace madurl
