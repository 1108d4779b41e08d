#pragma once

#include <array>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "madurl/feature_vector.hpp"
#include "madurl/providers.hpp"
#include "madurl/url.hpp"

namespace madurl {

struct EmptyString : Error {
    EmptyString() : Error("shannon_entropy: empty string") {}
};
struct UnknownKind : Error {
    explicit UnknownKind(const std::string& s) : Error("unknown typosquat kind: " + s) {}
};

int levenshtein(const std::string& a, const std::string& b);

double shannon_entropy(const std::string& s);  // bits per character

// char -> replacement strings used for confusable substitution.
using HomoglyphTable = std::unordered_map<char, std::vector<std::string>>;
HomoglyphTable load_homoglyphs(const std::string& path);

enum class TyposquatKind {
    Hyphenation,
    Homoglyph,
    VowelSwap,
    Bitsquatting,
    Insertion,
    Omission,
    Repetition,
    Replacement,
    Subdomain,
    Transposition,
    Addition,
};
// Table order of the deep-web variant rows.
const std::vector<TyposquatKind>& typosquat_kinds();
TyposquatKind typosquat_kind_from_string(const std::string& s);
std::string to_string(TyposquatKind k);

// Deterministic, duplicate-free permutations of a (lowercase) domain label.
// Candidates stay within [a-z0-9-] labels; the subdomain kind introduces a
// single interior dot.
std::set<std::string> typosquat_variants(const std::string& domain, TyposquatKind kind,
                                         const HomoglyphTable* homoglyphs = nullptr);

// Count of generated variants the registry reports registered; -1 when the
// registry is unavailable.
int typosquat_feature(const std::string& domain, TyposquatKind kind, DomainRegistry& registry,
                      const HomoglyphTable* homoglyphs = nullptr);

// How many of the top <=60 result hosts share the query's registered domain.
int search_hit_count(const std::string& registered_domain, SearchProvider& search,
                     const TldTable& tlds);

// Slots 15..22: IP, ASN, country, CIDR, postal, creation, updation, age.
std::array<double, 8> host_features(const std::string& registered_domain, WhoisProvider& whois,
                                    std::int64_t today_epoch_day);

// Slots 23..40, scanned from the fetched body; all -1 when the fetch fails.
std::array<double, 18> content_features(const ParsedUrl& u, PageFetcher& fetcher);

struct WebContext {
    const ProviderSuite* providers = nullptr;
    const TldTable* tlds = nullptr;
    const std::vector<std::string>* suspicious_domains = nullptr;
    const HomoglyphTable* homoglyphs = nullptr;
    std::int64_t today_epoch_day = 0;
};

WebFeatures extract_web(const ParsedUrl& u, const RawUrl& raw, const WebContext& ctx);

}  // namespace madurl
