#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "madurl/ensemble.hpp"

namespace madurl {

struct EmptyMatrix : Error {
    EmptyMatrix() : Error("metrics: empty confusion matrix") {}
};

// Positive class = malicious = label 1.
struct ConfusionMatrix {
    long long tp = 0, tn = 0, fp = 0, fn = 0;
    long long total() const { return tp + tn + fp + fn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

ConfusionMatrix confusion_from_predictions(const std::vector<int>& predicted,
                                           const std::vector<int>& truth);

// Accuracy/precision as percentages, rates as fractions. Undefined
// denominators surface as absent values, never as zero.
struct MetricsResult {
    double accuracy_pct = 0.0;
    std::optional<double> precision_pct;
    std::optional<double> fpr;
    std::optional<double> fnr;
};

MetricsResult metrics(const ConfusionMatrix& cm);

struct EvalReport {
    std::string trained_on;
    std::string tested_on;
    std::string model_kind;
    int folds = 0;  // 0 = plain train/test
    std::uint64_t seed = 0;
    ConfusionMatrix cm;
    MetricsResult result;

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

// Matched protocol: k-fold cross-validation on one dataset with the scaler
// fitted per fold on the training side; fold confusion matrices are pooled.
EvalReport eval_matched(const LabeledDataset& d, EnsembleKind kind, int folds,
                        std::uint64_t seed, const TrainOptions& base);

// Mismatched protocol: every ordered (train, test) dataset pair.
std::vector<EvalReport> eval_mismatched(const std::vector<LabeledDataset>& datasets,
                                        EnsembleKind kind, std::uint64_t seed,
                                        const TrainOptions& base);

}  // namespace madurl
