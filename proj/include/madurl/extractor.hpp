#pragma once

#include <memory>
#include <string>
#include <unordered_set>

#include "madurl/dataset.hpp"
#include "madurl/lexical.hpp"
#include "madurl/providers.hpp"
#include "madurl/web_features.hpp"

namespace madurl {

struct DataPaths {
    std::string tld_snapshot;
    std::string dictionary;
    std::string sensitive_words;
    std::string suspicious_domains;
    std::string homoglyphs;
};

// Bundled snapshots loaded once and shared read-only across threads.
struct ExtractorResources {
    TldTable tlds;
    PosDictionary dictionary;
    std::vector<std::string> sensitive_words;
    std::vector<std::string> suspicious_list;
    std::unordered_set<std::string> suspicious_set;
    HomoglyphTable homoglyphs;

    static ExtractorResources load(const DataPaths& paths);
};

// Per-corpus extraction state: n-gram models and categorical encoders are
// fitted on the training corpus, then applied to any row.
class FeatureExtractor {
  public:
    static FeatureExtractor fit(const LabeledDataset& train, const ExtractorResources& res);

    FeatureVector extract(const RawUrl& raw, const ProviderSuite& providers,
                          std::int64_t today_epoch_day) const;

    // Featurizes every row (parallel, row-order stable); unparsable rows are
    // dropped and counted in `skipped`.
    LabeledDataset extract_all(const LabeledDataset& d, const ProviderSuite& providers,
                               std::int64_t today_epoch_day) const;

    nlohmann::json encoders_to_json() const;

    const NgramModel& unigram() const { return uni_; }
    const NgramModel& bigram() const { return bi_; }
    const NgramModel& trigram() const { return tri_; }

  private:
    const ExtractorResources* res_ = nullptr;
    NgramModel uni_, bi_, tri_;
    StringEncoder tld_enc_, ext_enc_;
};

}  // namespace madurl
