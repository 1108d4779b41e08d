#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "madurl/tree.hpp"

namespace madurl {

enum class EnsembleKind { RandomForest, AdaBoost, GradientBoost, RegularizedBoost };
EnsembleKind ensemble_kind_from_string(const std::string& s);
std::string to_string(EnsembleKind k);
const std::vector<EnsembleKind>& all_ensemble_kinds();

struct TrainOptions {
    int n_estimators = 100;
    int max_depth = 10;       // forest trees
    int base_depth = 2;       // adaboost stumps
    int boost_depth = 3;      // boosting trees (1..5 is the useful range)
    double learning_rate = 0.1;
    double lambda = 1.0;  // regularized boosting only
    double gamma = 0.0;
    int max_features = 0;  // 0 = sqrt(p) for forests; -1 = all
    std::uint64_t seed = 0;
};

class EnsembleModel {
  public:
    EnsembleKind kind = EnsembleKind::RandomForest;
    std::vector<DecisionTree> trees;
    std::vector<double> tree_weights;  // alpha (adaboost), learning rate (boosting), 1 (forest)
    double base_score = 0.0;           // additive models: initial log-odds
    TrainOptions options;
    std::size_t n_features = 0;
    std::uint64_t schema_hash = 0;  // 0 when trained outside the URL schema
    std::vector<double> training_loss;  // boosting: per-round logistic loss

    int n_estimators() const { return static_cast<int>(trees.size()); }

    // Class probabilities, clamped into [1e-6, 1 - 1e-6].
    std::array<double, 2> predict_proba(std::span<const double> v) const;
    int predict(std::span<const double> v) const;

    nlohmann::json to_json() const;
    static EnsembleModel from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
    static EnsembleModel load(const std::string& path);
};

inline constexpr double kProbClamp = 1e-6;

EnsembleModel train_random_forest(const Matrix& x, const std::vector<int>& y,
                                  const TrainOptions& opts);
EnsembleModel train_adaboost(const Matrix& x, const std::vector<int>& y, const TrainOptions& opts);
EnsembleModel train_gradient_boost(const Matrix& x, const std::vector<int>& y,
                                   const TrainOptions& opts);
EnsembleModel train_regularized_boost(const Matrix& x, const std::vector<int>& y,
                                      const TrainOptions& opts);
EnsembleModel train_ensemble(EnsembleKind kind, const Matrix& x, const std::vector<int>& y,
                             const TrainOptions& opts);
// Convenience over a featurized dataset; stamps the schema hash.
EnsembleModel train_ensemble(EnsembleKind kind, const LabeledDataset& d, const TrainOptions& opts);

// Per-row probabilities for a whole matrix (parallel, row-order stable).
std::vector<std::array<double, 2>> predict_proba_batch(const EnsembleModel& m, const Matrix& x);

struct GridSearchResult {
    struct Row {
        int n_estimators = 0;
        double mean_accuracy = 0.0;
    };
    std::vector<Row> table;
    int best_n_estimators = 0;
    double best_accuracy = 0.0;
    EnsembleModel best_model;  // retrained on the full dataset
};

// Cross-validated sweep over the n_estimators grid; ties break toward the
// smaller tree count.
GridSearchResult grid_search(const LabeledDataset& d, EnsembleKind kind,
                             const std::vector<int>& grid, int folds, const TrainOptions& base,
                             std::uint64_t seed);

}  // namespace madurl
