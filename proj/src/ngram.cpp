#include "madurl/ngram.hpp"

#include <cmath>

namespace madurl {

namespace {

std::string pad(const std::string& s, int order) {
    if (order == 1) return s;  // no context to pad, no termination to model
    std::string out(static_cast<std::size_t>(order - 1), '^');
    out += s;
    out += '$';
    return out;
}

}  // namespace

std::string NgramModel::normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char raw : s) {
        char c = raw;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
        out += ok ? c : '-';
    }
    return out;
}

NgramModel ngram_train(const std::vector<std::string>& corpus, int order) {
    if (corpus.empty()) throw EmptyCorpus{};
    if (order < 1 || order > 3) throw Error("ngram_train: order must be 1..3");
    NgramModel m;
    m.order_ = order;
    for (const auto& raw : corpus) {
        const std::string s = pad(NgramModel::normalize(raw), order);
        if (s.size() < static_cast<std::size_t>(order)) continue;
        for (std::size_t i = 0; i + order <= s.size(); ++i) {
            ++m.counts_[s.substr(i, order)];
            ++m.total_;
            if (order > 1) ++m.context_counts_[s.substr(i, order - 1)];
        }
    }
    return m;
}

long long NgramModel::gram_count(const std::string& gram) const {
    auto it = counts_.find(gram);
    return it == counts_.end() ? 0 : it->second;
}

long long NgramModel::context_count(const std::string& context) const {
    if (order_ == 1) return total_;
    auto it = context_counts_.find(context);
    return it == context_counts_.end() ? 0 : it->second;
}

double NgramModel::prob_ml(const std::string& context, char next) const {
    const long long ctx = context_count(context);
    if (ctx == 0) return 0.0;
    return static_cast<double>(gram_count(context + next)) / static_cast<double>(ctx);
}

double NgramModel::prob_smoothed(const std::string& context, char next) const {
    const long long ctx = context_count(context);
    return (static_cast<double>(gram_count(context + next)) + 1.0) /
           (static_cast<double>(ctx) + kAlphabetSize);
}

double NgramModel::score(const std::string& domain) const {
    const std::string norm = normalize(domain);
    if (norm.size() < static_cast<std::size_t>(order_))
        return std::log(1.0 / kAlphabetSize);
    const std::string s = pad(norm, order_);
    double sum = 0.0;
    long long n = 0;
    for (std::size_t i = 0; i + order_ <= s.size(); ++i) {
        const std::string context = s.substr(i, order_ - 1);
        sum += std::log(prob_smoothed(context, s[i + order_ - 1]));
        ++n;
    }
    return sum / static_cast<double>(n);
}

}  // namespace madurl
