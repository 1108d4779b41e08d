#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "madurl/common.hpp"

namespace madurl {

enum class PosTag : std::uint8_t { Noun, Verb, Adjective, Adverb, Pronoun };

std::optional<PosTag> pos_from_string(std::string_view s);

// Word -> part-of-speech snapshot (tab-separated word<TAB>pos, one entry per
// line, a word may carry several tags across lines). Bundled so the
// domain-word classification is deterministic.
class PosDictionary {
  public:
    static PosDictionary load_file(const std::string& path);
    static PosDictionary from_pairs(const std::vector<std::pair<std::string, PosTag>>& pairs);

    bool empty() const { return tags_.empty(); }
    std::size_t size() const { return tags_.size(); }
    bool contains(const std::string& word) const { return tags_.count(word) > 0; }
    std::vector<PosTag> tags(const std::string& word) const;

    // Splits `s` into the fewest dictionary words covering it completely
    // (pieces of length >= 2). nullopt when no full cover exists.
    std::optional<std::vector<std::string>> segment(const std::string& s) const;

  private:
    std::unordered_map<std::string, std::uint8_t> tags_;  // bitmask over PosTag
    std::size_t max_word_len_ = 0;
};

// Plain one-entry-per-line list ("//" comments, blank lines skipped),
// lowercased. Used for the sensitive-word and suspicious-domain files.
std::vector<std::string> load_word_lines(const std::string& path);

}  // namespace madurl
