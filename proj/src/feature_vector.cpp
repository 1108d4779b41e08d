#include "madurl/feature_vector.hpp"

namespace madurl {

const std::array<SlotInfo, kFeatureSlots>& feature_schema() {
    static const std::array<SlotInfo, kFeatureSlots> schema = {{
        // Linguistic
        {"URLLength", "linguistic", "count", false},
        {"CheckIPAsHostName", "linguistic", "binary", false},
        {"CheckEXE", "linguistic", "binary", false},
        {"DigitAlphabetRatio", "linguistic", "ratio", false},
        {"SpecialcharAlphabetRatio", "linguistic", "ratio", false},
        {"UppercaseLowercaseRatio", "linguistic", "ratio", false},
        {"DomainURLRatio", "linguistic", "ratio", false},
        {"NumericCharCount", "linguistic", "count", false},
        {"EnglishLetterCount", "linguistic", "count", false},
        {"SpecialCharCount", "linguistic", "count", false},
        {"DotCount", "linguistic", "count", false},
        {"SemiColCount", "linguistic", "count", false},
        {"UnderscoreCount", "linguistic", "count", false},
        {"QuesMarkCount", "linguistic", "count", false},
        {"HashCharCount", "linguistic", "count", false},
        {"EqualCount", "linguistic", "count", false},
        {"PercentCharCount", "linguistic", "count", false},
        {"AmpersandCount", "linguistic", "count", false},
        {"DashCharCount", "linguistic", "count", false},
        {"DelimiterCount", "linguistic", "count of (){}[],/*", false},
        {"AtCharCount", "linguistic", "count", false},
        {"TildeCharCount", "linguistic", "count", false},
        {"DoubleSlashCount", "linguistic", "count of // in path", false},
        {"IsHashed", "linguistic", "binary: path has a >=16-char hex run", false},
        {"TLD", "linguistic", "frequency-ranked id, 0 = unseen", false},
        {"DistDigitAlphabet", "linguistic", "mean |digit index - nearest letter index|", false},
        {"HttpsInUrl", "linguistic", "binary", false},
        {"FileExtension", "linguistic", "frequency-ranked id, 0 = unseen", false},
        {"TLDInSubdomain", "linguistic", "binary", false},
        {"TLDInPath", "linguistic", "binary", false},
        {"HttpsInHostName", "linguistic", "binary", false},
        {"HostNameLength", "linguistic", "count", false},
        {"PathLength", "linguistic", "count", false},
        {"QueryLength", "linguistic", "count", false},
        {"DistWordBased", "linguistic", "binary", false},
        {"URLWithoutwww", "linguistic", "binary: 1 when no www label", false},
        {"FTPUsed", "linguistic", "binary", false},
        {"JSUsed", "linguistic", "binary", false},
        {"FilesInURL", "linguistic", "binary: file-like path segment", false},
        {"CSSUsed", "linguistic", "binary", false},
        // Human-engineered
        {"IsDomainEnglishWord", "human", "binary", false},
        {"IsDomainMeaningful", "human", "binary", false},
        {"IsDomainPronounceable", "human", "binary", false},
        {"IsDomainRandom", "human", "binary", false},
        {"Unigram", "human", "mean log-probability", false},
        {"Bigram", "human", "mean log-probability", false},
        {"Trigram", "human", "mean log-probability", false},
        {"SensitiveWordCount", "human", "count over host+path", false},
        {"InSuspiciousList", "human", "binary", false},
        // Deep-web
        {"LevenshteinDistance", "deepweb", "edit distance to nearest search host", true},
        {"Entropy", "deepweb", "bits per character", false},
        {"Hyphenstring", "deepweb", "registered-variant count", true},
        {"Homoglyph", "deepweb", "registered-variant count", true},
        {"Vowel", "deepweb", "registered-variant count", true},
        {"Bitsquatting", "deepweb", "registered-variant count", true},
        {"InsertionString", "deepweb", "registered-variant count", true},
        {"Omission", "deepweb", "registered-variant count", true},
        {"Repeatition", "deepweb", "registered-variant count", true},
        {"Replacement", "deepweb", "registered-variant count", true},
        {"Subdomain", "deepweb", "registered-variant count", true},
        {"Transposition", "deepweb", "registered-variant count", true},
        {"AdditionString", "deepweb", "registered-variant count", true},
        // URL segmentation
        {"GoogleSearchFeature", "urlseg", "hit count over top 60 results", true},
        // Host-based
        {"IPAddress", "host", "IPv4 as base-256 integer", true},
        {"ASNNumber", "host", "ASN", true},
        {"ASNCountryCode", "host", "letter-pair code a*26+b", true},
        {"ASN_CIDR", "host", "network base address as base-256 integer", true},
        {"ASNPostalCode", "host", "20-bit string hash", true},
        {"ASNCreationDate", "host", "epoch days", true},
        {"ASNUpdationDate", "host", "epoch days", true},
        {"DomainAgeInDays", "host", "today - creation, days", true},
        // Content-based
        {"ImgCount", "content", "count", true},
        {"TotalLinks", "content", "count of a/link tags", true},
        {"NumParameters", "content", "count", true},
        {"NumFragments", "content", "count", true},
        {"BodyTagCount", "content", "count", true},
        {"MetaTagCount", "content", "count", true},
        {"DivTagCount", "content", "count", true},
        {"FakeLinkInStatusBar", "content", "binary", true},
        {"RightClickDisabled", "content", "binary", true},
        {"PopUpWindow", "content", "binary", true},
        {"CheckMailto", "content", "binary", true},
        {"CheckFrametag", "content", "binary", true},
        {"TitleCheck", "content", "binary: title missing or empty", true},
        {"SourceEvalCount", "content", "count", true},
        {"SourceEscapeCount", "content", "count", true},
        {"SourceExecCount", "content", "count", true},
        {"SourceSearchCount", "content", "count", true},
        {"ImageOnlyInForm", "content", "binary", true},
    }};
    return schema;
}

std::uint64_t feature_schema_hash() {
    static const std::uint64_t h = [] {
        std::uint64_t acc = 1469598103934665603ull;
        for (const auto& slot : feature_schema()) {
            acc = splitmix64(acc ^ fnv1a64(slot.name));
            acc = splitmix64(acc ^ fnv1a64(slot.subgroup));
        }
        return acc;
    }();
    return h;
}

FeatureVector assemble_feature_vector(const LexicalFeatures& lex, const WebFeatures& web) {
    FeatureVector v;
    v.values.reserve(kFeatureSlots);
    v.values.insert(v.values.end(), lex.begin(), lex.end());
    v.values.insert(v.values.end(), web.begin(), web.end());
    if (static_cast<int>(v.values.size()) != kFeatureSlots)
        throw SchemaMismatch("assembled vector is not " + std::to_string(kFeatureSlots) + " slots");
    return v;
}

}  // namespace madurl
