#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "madurl/common.hpp"

namespace madurl {

// Frequency-ranked categorical encoder: the most frequent value gets id 1
// (ties broken lexicographically); unseen or empty values encode to 0.
class StringEncoder {
  public:
    static StringEncoder fit(const std::vector<std::string>& values);
    static StringEncoder from_vocabulary(std::vector<std::string> vocab);

    int encode(const std::string& value) const {
        auto it = ids_.find(value);
        return it == ids_.end() ? 0 : it->second;
    }
    const std::vector<std::string>& vocabulary() const { return vocab_; }  // vocab_[i] has id i+1

  private:
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, int> ids_;
};

}  // namespace madurl
