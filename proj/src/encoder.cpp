#include "madurl/encoder.hpp"

#include <algorithm>
#include <map>

namespace madurl {

StringEncoder StringEncoder::fit(const std::vector<std::string>& values) {
    std::map<std::string, long long> counts;
    for (const auto& v : values)
        if (!v.empty()) ++counts[v];
    std::vector<std::pair<std::string, long long>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> vocab;
    vocab.reserve(ranked.size());
    for (auto& [value, count] : ranked) vocab.push_back(value);
    return from_vocabulary(std::move(vocab));
}

StringEncoder StringEncoder::from_vocabulary(std::vector<std::string> vocab) {
    StringEncoder e;
    e.vocab_ = std::move(vocab);
    for (std::size_t i = 0; i < e.vocab_.size(); ++i)
        e.ids_[e.vocab_[i]] = static_cast<int>(i) + 1;
    return e;
}

}  // namespace madurl
