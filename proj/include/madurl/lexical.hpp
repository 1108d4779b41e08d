#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "madurl/encoder.hpp"
#include "madurl/feature_vector.hpp"
#include "madurl/ngram.hpp"
#include "madurl/url.hpp"
#include "madurl/wordlist.hpp"

namespace madurl {

struct EmptyDictionary : Error {
    EmptyDictionary() : Error("classify_domain_word: empty dictionary") {}
};
struct EmptyDomain : Error {
    EmptyDomain() : Error("classify_domain_word: empty domain") {}
};

// Exactly one of meaningful / pronounceable / random is set.
struct DomainWordFlags {
    int is_english = 0;
    int is_meaningful = 0;
    int is_pronounceable = 0;
    int is_random = 0;
};

// Dictionary-membership and part-of-speech routing of a (lowercase) domain
// label: a cover by noun/pronoun words is meaningful, by verb/adjective words
// pronounceable, anything uncoverable is a random string.
DomainWordFlags classify_domain_word(const std::string& domain, const PosDictionary& dictionary);

struct SensitiveResult {
    int sensitive_word_count = 0;
    int in_suspicious_list = 0;
};
SensitiveResult sensitive_and_suspicious(const std::string& domain_and_path,
                                         const std::string& registered_domain,
                                         const std::vector<std::string>& sensitive_words,
                                         const std::unordered_set<std::string>& suspicious_domains);

// Everything the lexical extractor needs beyond the URL itself. All members
// are immutable after construction, so extraction can run in parallel.
struct LexicalContext {
    const TldTable* tlds = nullptr;
    const PosDictionary* dictionary = nullptr;
    const NgramModel* unigram = nullptr;
    const NgramModel* bigram = nullptr;
    const NgramModel* trigram = nullptr;
    const std::vector<std::string>* sensitive_words = nullptr;
    const std::unordered_set<std::string>* suspicious_domains = nullptr;
    const StringEncoder* tld_encoder = nullptr;
    const StringEncoder* ext_encoder = nullptr;
};

// Table slots 1..40: lengths, counts, ratios and token flags over the raw
// string and the parsed components.
std::array<double, 40> extract_linguistic(const ParsedUrl& u, const RawUrl& raw,
                                          const LexicalContext& ctx);

// All 49 lexical slots (linguistic + human-engineered).
LexicalFeatures extract_lexical(const ParsedUrl& u, const RawUrl& raw, const LexicalContext& ctx);

// Lowercase extension of the final path segment ([a-z0-9], at most 5 chars).
std::string file_extension(const std::string& path);

}  // namespace madurl
