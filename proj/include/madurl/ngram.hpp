#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "madurl/common.hpp"

namespace madurl {

struct EmptyCorpus : Error {
    EmptyCorpus() : Error("ngram_train: empty corpus") {}
};

// Character n-gram model over the lowercase [a-z0-9-] domain alphabet with
// boundary padding ('^' fills the left context, '$' marks the end). The
// effective next-character alphabet therefore has 38 symbols.
class NgramModel {
  public:
    static constexpr int kAlphabetSize = 38;  // 26 + 10 + '-' + end marker

    int order() const { return order_; }
    long long total() const { return total_; }
    int alphabet_size() const { return kAlphabetSize; }

    long long gram_count(const std::string& gram) const;
    long long context_count(const std::string& context) const;

    // Maximum-likelihood P(next | context); 0 when the context is unseen.
    double prob_ml(const std::string& context, char next) const;
    // Add-one smoothed P(next | context).
    double prob_smoothed(const std::string& context, char next) const;

    // Mean log-probability per n-gram with add-one smoothing. Inputs shorter
    // than the model order return the smoothing floor log(1/alphabet_size).
    double score(const std::string& domain) const;

    static std::string normalize(std::string_view s);  // lowercase, off-alphabet -> '-'

    friend NgramModel ngram_train(const std::vector<std::string>& corpus, int order);

  private:
    int order_ = 1;
    long long total_ = 0;
    std::unordered_map<std::string, long long> counts_;          // order-length grams
    std::unordered_map<std::string, long long> context_counts_;  // (order-1)-length contexts
};

NgramModel ngram_train(const std::vector<std::string>& corpus, int order);

}  // namespace madurl
