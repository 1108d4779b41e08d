#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "madurl/feature_vector.hpp"
#include "madurl/url.hpp"

namespace madurl {

struct MissingColumn : Error {
    explicit MissingColumn(const std::string& col) : Error("missing csv column: " + col) {}
};
struct EmptyFile : Error {
    explicit EmptyFile(const std::string& path) : Error("empty input file: " + path) {}
};
struct InsufficientRows : Error {
    explicit InsufficientRows(const std::string& what) : Error("insufficient rows: " + what) {}
};
struct NoFeatures : Error {
    NoFeatures() : Error("dataset has no feature vectors") {}
};
struct TooFewRows : Error {
    explicit TooFewRows(const std::string& what) : Error("too few rows: " + what) {}
};

struct DatasetRow {
    std::string url;
    int label = 0;  // 0 benign, 1 malicious
    std::optional<FeatureVector> features;
};

struct LabeledDataset {
    std::string name;
    std::vector<DatasetRow> rows;
    std::vector<std::string> provenance;
    std::uint64_t seed = 0;
    std::size_t skipped = 0;  // malformed rows dropped on the way in

    std::size_t count_label(int label) const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.label == label;
        return n;
    }
    bool has_features() const {
        for (const auto& r : rows)
            if (!r.features) return false;
        return !rows.empty();
    }
};

// CSV with a header declaring url,label columns (extra columns allowed).
// Malformed rows are counted and skipped, never fatal.
LabeledDataset ingest_csv(const std::string& path);
void write_csv(const LabeledDataset& d, const std::string& path);  // url,label
// url,label plus one column per feature slot.
void write_features_csv(const LabeledDataset& d, const std::string& path);
LabeledDataset read_features_csv(const std::string& path);

// Hostname dedup (first row wins), empty-URL removal, seeded shuffle.
LabeledDataset preprocess(const LabeledDataset& d, std::uint64_t seed);

// Balanced merge: each class contributes min(|benign|/2, |malicious|) rows,
// sampled without replacement, then shuffled.
LabeledDataset merge_balanced(const LabeledDataset& benign, const LabeledDataset& malicious,
                              std::uint64_t seed);

// Robust per-slot standardization: (x - median) / (Q3 - Q1), with linear
// interpolation between order statistics. -1 sentinels are excluded from the
// fit but scaled on apply; zero-IQR slots pass through unchanged.
class ScalerState {
  public:
    static ScalerState fit(const LabeledDataset& d);
    FeatureVector apply(const FeatureVector& v) const;
    void apply_in_place(LabeledDataset& d) const;

    const std::vector<double>& medians() const { return median_; }
    const std::vector<double>& iqrs() const { return iqr_; }

    nlohmann::json to_json() const;
    static ScalerState from_json(const nlohmann::json& j);

  private:
    std::vector<double> median_, iqr_;
};

double quantile_linear(std::vector<double> values, double p);  // sorts its copy

// Stratified split/folds; pure functions of (input, seed).
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& d, double train_fraction,
                                                std::uint64_t seed);
std::vector<std::vector<std::size_t>> kfold(const LabeledDataset& d, int k, std::uint64_t seed);

struct ClassProfile {
    std::size_t count = 0;
    double mean_url_length = 0;
    double mean_special_chars = 0;
    double mean_path_length = 0;
    double ip_host_fraction = 0;
    std::vector<std::array<double, 3>> histogram;  // bucket_lo, bucket_hi, count
};

struct ProfileReport {
    ClassProfile benign;
    ClassProfile malicious;
    nlohmann::json to_json() const;
    static std::string histogram_csv(const ClassProfile& p);
};

ProfileReport profile(const LabeledDataset& d);

// Desk-scale stand-in corpus: benign rows use dictionary-word domains and
// short paths, malicious rows use random digit-heavy domains, long paths and
// sensitive tokens; class statistics track the published corpus profile.
LabeledDataset synthesize_corpus(std::size_t n_per_class, std::uint64_t seed);

}  // namespace madurl
