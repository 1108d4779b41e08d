#include "madurl/metrics.hpp"

#include "madurl/parallel.hpp"

namespace madurl {

ConfusionMatrix confusion_from_predictions(const std::vector<int>& predicted,
                                           const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) throw Error("confusion: size mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (truth[i] == 1)
            predicted[i] == 1 ? ++cm.tp : ++cm.fn;
        else
            predicted[i] == 1 ? ++cm.fp : ++cm.tn;
    }
    return cm;
}

MetricsResult metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw EmptyMatrix{};
    MetricsResult r;
    r.accuracy_pct = 100.0 * static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp > 0)
        r.precision_pct = 100.0 * static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    if (cm.fp + cm.tn > 0)
        r.fpr = static_cast<double>(cm.fp) / static_cast<double>(cm.fp + cm.tn);
    if (cm.tp + cm.fn > 0)
        r.fnr = static_cast<double>(cm.fn) / static_cast<double>(cm.tp + cm.fn);
    return r;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j{{"trained_on", trained_on},
                     {"tested_on", tested_on},
                     {"model_kind", model_kind},
                     {"folds", folds},
                     {"seed", seed},
                     {"tp", cm.tp},
                     {"tn", cm.tn},
                     {"fp", cm.fp},
                     {"fn", cm.fn},
                     {"accuracy", result.accuracy_pct}};
    j["precision"] = result.precision_pct ? nlohmann::json(*result.precision_pct) : nlohmann::json();
    j["fpr"] = result.fpr ? nlohmann::json(*result.fpr) : nlohmann::json();
    j["fnr"] = result.fnr ? nlohmann::json(*result.fnr) : nlohmann::json();
    return j;
}

std::string EvalReport::csv_header() {
    return "trained_on,tested_on,model_kind,folds,accuracy,precision,fpr,fnr";
}

std::string EvalReport::csv_row() const {
    auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); };
    return trained_on + "," + tested_on + "," + model_kind + "," + std::to_string(folds) + "," +
           fmt_double(result.accuracy_pct) + "," + opt(result.precision_pct) + "," +
           opt(result.fpr) + "," + opt(result.fnr);
}

namespace {

LabeledDataset take_rows(const LabeledDataset& d, const std::vector<std::size_t>& idx) {
    LabeledDataset out;
    out.name = d.name;
    out.provenance = d.provenance;
    out.seed = d.seed;
    out.rows.reserve(idx.size());
    for (std::size_t i : idx) out.rows.push_back(d.rows[i]);
    return out;
}

struct FittedPipeline {
    ScalerState scaler;
    EnsembleModel model;
};

FittedPipeline fit_pipeline(LabeledDataset train, EnsembleKind kind, const TrainOptions& opts) {
    FittedPipeline p{ScalerState::fit(train), {}};
    p.scaler.apply_in_place(train);
    p.model = train_ensemble(kind, to_matrix(train), labels_of(train), opts);
    return p;
}

ConfusionMatrix test_pipeline(const FittedPipeline& p, LabeledDataset test) {
    p.scaler.apply_in_place(test);
    const Matrix xt = to_matrix(test);
    const auto probs = predict_proba_batch(p.model, xt);
    std::vector<int> pred(xt.n_rows);
    for (std::size_t i = 0; i < xt.n_rows; ++i) pred[i] = probs[i][1] > probs[i][0] ? 1 : 0;
    return confusion_from_predictions(pred, labels_of(test));
}

ConfusionMatrix evaluate_pair(LabeledDataset train, const LabeledDataset& test, EnsembleKind kind,
                              const TrainOptions& opts) {
    return test_pipeline(fit_pipeline(std::move(train), kind, opts), test);
}

}  // namespace

EvalReport eval_matched(const LabeledDataset& d, EnsembleKind kind, int folds,
                        std::uint64_t seed, const TrainOptions& base) {
    if (folds != 5 && folds != 10) throw Error("eval_matched: folds must be 5 or 10");
    const auto fold_idx = kfold(d, folds, derive_seed(seed, "eval/folds"));

    EvalReport report;
    report.trained_on = report.tested_on = d.name;
    report.model_kind = to_string(kind);
    report.folds = folds;
    report.seed = seed;

    for (std::size_t f = 0; f < fold_idx.size(); ++f) {
        std::vector<char> in_test(d.rows.size(), 0);
        for (std::size_t i : fold_idx[f]) in_test[i] = 1;
        std::vector<std::size_t> train_idx;
        for (std::size_t i = 0; i < d.rows.size(); ++i)
            if (!in_test[i]) train_idx.push_back(i);

        TrainOptions opts = base;
        opts.seed = derive_seed(seed, "eval/train", f);
        report.cm += evaluate_pair(take_rows(d, train_idx), take_rows(d, fold_idx[f]), kind, opts);
    }
    report.result = metrics(report.cm);
    return report;
}

std::vector<EvalReport> eval_mismatched(const std::vector<LabeledDataset>& datasets,
                                        EnsembleKind kind, std::uint64_t seed,
                                        const TrainOptions& base) {
    if (datasets.size() < 2) throw Error("eval_mismatched: need >= 2 datasets");
    std::vector<EvalReport> reports;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        TrainOptions opts = base;
        opts.seed = derive_seed(seed, "mismatch/train", i);
        const FittedPipeline pipeline = fit_pipeline(datasets[i], kind, opts);
        for (std::size_t j = 0; j < datasets.size(); ++j) {
            if (i == j) continue;
            EvalReport rep;
            rep.trained_on = datasets[i].name;
            rep.tested_on = datasets[j].name;
            rep.model_kind = to_string(kind);
            rep.folds = 0;
            rep.seed = seed;
            rep.cm = test_pipeline(pipeline, datasets[j]);
            rep.result = metrics(rep.cm);
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

}  // namespace madurl
