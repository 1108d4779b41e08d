#include "madurl/wordlist.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace madurl {

std::optional<PosTag> pos_from_string(std::string_view s) {
    if (s == "noun") return PosTag::Noun;
    if (s == "verb") return PosTag::Verb;
    if (s == "adjective") return PosTag::Adjective;
    if (s == "adverb") return PosTag::Adverb;
    if (s == "pronoun") return PosTag::Pronoun;
    return std::nullopt;
}

PosDictionary PosDictionary::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dictionary snapshot: " + path);
    std::vector<std::pair<std::string, PosTag>> pairs;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view v = trim(line);
        if (v.empty() || v.rfind("//", 0) == 0) continue;
        auto tab = v.find('\t');
        if (tab == std::string_view::npos) continue;
        auto tag = pos_from_string(trim(v.substr(tab + 1)));
        if (!tag) continue;
        pairs.emplace_back(to_lower(trim(v.substr(0, tab))), *tag);
    }
    return from_pairs(pairs);
}

PosDictionary PosDictionary::from_pairs(const std::vector<std::pair<std::string, PosTag>>& pairs) {
    PosDictionary d;
    for (const auto& [word, tag] : pairs) {
        d.tags_[word] |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(tag));
        d.max_word_len_ = std::max(d.max_word_len_, word.size());
    }
    return d;
}

std::vector<PosTag> PosDictionary::tags(const std::string& word) const {
    std::vector<PosTag> out;
    auto it = tags_.find(word);
    if (it == tags_.end()) return out;
    for (unsigned b = 0; b < 5; ++b)
        if (it->second & (1u << b)) out.push_back(static_cast<PosTag>(b));
    return out;
}

std::optional<std::vector<std::string>> PosDictionary::segment(const std::string& s) const {
    if (s.empty()) return std::nullopt;
    const std::size_t n = s.size();
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
    // best[i]: fewest words covering s[0..i); prev[i]: start of the last word.
    std::vector<std::size_t> best(n + 1, kInf), prev(n + 1, 0);
    best[0] = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t lo = i > max_word_len_ ? i - max_word_len_ : 0;
        for (std::size_t j = lo; j + 2 <= i; ++j) {  // pieces of length >= 2
            if (best[j] == kInf) continue;
            if (tags_.count(s.substr(j, i - j)) && best[j] + 1 < best[i]) {
                best[i] = best[j] + 1;
                prev[i] = j;
            }
        }
    }
    if (best[n] == kInf) return std::nullopt;
    std::vector<std::string> words;
    for (std::size_t i = n; i > 0; i = prev[i]) words.push_back(s.substr(prev[i], i - prev[i]));
    std::reverse(words.begin(), words.end());
    return words;
}

std::vector<std::string> load_word_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open word list: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view v = trim(line);
        if (v.empty() || v.rfind("//", 0) == 0) continue;
        out.push_back(to_lower(v));
    }
    return out;
}

}  // namespace madurl
