#include "madurl/lexical.hpp"

#include <algorithm>
#include <cmath>

namespace madurl {

namespace {

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_special(char c) { return c >= 33 && c <= 126 && !is_letter(c) && !is_digit(c); }

int count_char(std::string_view s, char c) {
    return static_cast<int>(std::count(s.begin(), s.end(), c));
}

bool has_hex_run(std::string_view s, std::size_t min_len) {
    std::size_t run = 0;
    for (char c : s) {
        const bool hex = is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
        run = hex ? run + 1 : 0;
        if (run >= min_len) return true;
    }
    return false;
}

double dist_digit_alphabet(std::string_view s) {
    std::vector<std::size_t> digits, letters;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (is_digit(s[i])) digits.push_back(i);
        else if (is_letter(s[i])) letters.push_back(i);
    }
    if (digits.empty() || letters.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t d : digits) {
        // letters is sorted; nearest by binary search
        auto it = std::lower_bound(letters.begin(), letters.end(), d);
        std::size_t best = SIZE_MAX;
        if (it != letters.end()) best = *it - d;
        if (it != letters.begin()) best = std::min(best, d - *(it - 1));
        sum += static_cast<double>(best);
    }
    return sum / static_cast<double>(digits.size());
}

bool tld_in_tokens(std::string_view text, const TldTable& tlds) {
    std::string token;
    auto flush = [&]() {
        bool hit = !token.empty() && tlds.contains(token);
        token.clear();
        return hit;
    };
    for (char raw : text) {
        char c = raw;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) token += c;
        else if (flush()) return true;
    }
    return flush();
}

bool file_like_path(const std::string& path) {
    for (const auto& seg : split(path, '/'))
        if (!seg.empty() && seg.find('.') != std::string::npos) return true;
    return false;
}

}  // namespace

std::string file_extension(const std::string& path) {
    auto slash = path.find_last_of('/');
    std::string last = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = last.find_last_of('.');
    if (dot == std::string::npos || dot + 1 == last.size()) return "";
    std::string ext = to_lower(last.substr(dot + 1));
    if (ext.size() > 5) return "";
    for (char c : ext)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return "";
    return ext;
}

DomainWordFlags classify_domain_word(const std::string& domain, const PosDictionary& dictionary) {
    if (domain.empty()) throw EmptyDomain{};
    if (dictionary.empty()) throw EmptyDictionary{};

    DomainWordFlags flags;
    flags.is_english = dictionary.contains(domain) ? 1 : 0;

    // Letter runs are segmented independently; digits and '-' separate them.
    std::vector<std::string> runs;
    std::string run;
    for (char c : domain) {
        if (c >= 'a' && c <= 'z') run += c;
        else if (!run.empty()) { runs.push_back(run); run.clear(); }
    }
    if (!run.empty()) runs.push_back(run);

    std::vector<std::string> words;
    bool covered = !runs.empty();
    for (const auto& r : runs) {
        auto seg = dictionary.segment(r);
        if (!seg) { covered = false; break; }
        words.insert(words.end(), seg->begin(), seg->end());
    }

    if (!covered) {
        flags.is_random = 1;
        return flags;
    }
    bool noun_like = false, verb_like = false;
    for (const auto& w : words)
        for (PosTag t : dictionary.tags(w)) {
            if (t == PosTag::Noun || t == PosTag::Pronoun) noun_like = true;
            if (t == PosTag::Verb || t == PosTag::Adjective) verb_like = true;
        }
    if (noun_like) flags.is_meaningful = 1;
    else if (verb_like) flags.is_pronounceable = 1;
    else flags.is_random = 1;
    return flags;
}

SensitiveResult sensitive_and_suspicious(const std::string& domain_and_path,
                                         const std::string& registered_domain,
                                         const std::vector<std::string>& sensitive_words,
                                         const std::unordered_set<std::string>& suspicious_domains) {
    SensitiveResult out;
    const std::string text = to_lower(domain_and_path);
    for (const auto& w : sensitive_words) out.sensitive_word_count += count_occurrences(text, w);
    out.in_suspicious_list = suspicious_domains.count(to_lower(registered_domain)) ? 1 : 0;
    return out;
}

std::array<double, 40> extract_linguistic(const ParsedUrl& u, const RawUrl& raw,
                                          const LexicalContext& ctx) {
    const std::string r{trim(raw.text)};
    const std::string rl = to_lower(r);

    int digits = 0, letters = 0, specials = 0, uppers = 0, lowers = 0, delims = 0;
    for (char c : r) {
        if (is_digit(c)) ++digits;
        else if (is_letter(c)) ++letters;
        else if (is_special(c)) ++specials;
        if (c >= 'A' && c <= 'Z') ++uppers;
        if (c >= 'a' && c <= 'z') ++lowers;
        if (c == '(' || c == ')' || c == '{' || c == '}' || c == '[' || c == ']' ||
            c == ',' || c == '/' || c == '*')
            ++delims;
    }

    std::array<double, 40> f{};
    f[0] = static_cast<double>(r.size());
    f[1] = u.is_ip_host ? 1 : 0;
    f[2] = rl.find(".exe") != std::string::npos ? 1 : 0;
    f[3] = static_cast<double>(digits) / std::max(1, letters);
    f[4] = static_cast<double>(specials) / std::max(1, letters);
    f[5] = static_cast<double>(uppers) / std::max(1, lowers);
    f[6] = r.empty() ? 0.0 : static_cast<double>(u.domain.size()) / static_cast<double>(r.size());
    f[7] = digits;
    f[8] = letters;
    f[9] = specials;
    f[10] = count_char(r, '.');
    f[11] = count_char(r, ';');
    f[12] = count_char(r, '_');
    f[13] = count_char(r, '?');
    f[14] = count_char(r, '#');
    f[15] = count_char(r, '=');
    f[16] = count_char(r, '%');
    f[17] = count_char(r, '&');
    f[18] = count_char(r, '-');
    f[19] = delims;
    f[20] = count_char(r, '@');
    f[21] = count_char(r, '~');
    f[22] = count_occurrences(u.path, "//");
    f[23] = has_hex_run(u.path, 16) ? 1 : 0;
    f[24] = ctx.tld_encoder ? ctx.tld_encoder->encode(u.tld.value_or("")) : 0;
    f[25] = dist_digit_alphabet(r);
    f[26] = rl.find("https") != std::string::npos ? 1 : 0;
    f[27] = ctx.ext_encoder ? ctx.ext_encoder->encode(file_extension(u.path)) : 0;
    f[28] = u.subdomain && ctx.tlds && tld_in_tokens(*u.subdomain, *ctx.tlds) ? 1 : 0;
    f[29] = ctx.tlds && tld_in_tokens(u.path, *ctx.tlds) ? 1 : 0;
    f[30] = u.host.find("https") != std::string::npos ? 1 : 0;
    f[31] = static_cast<double>(u.host.size());
    f[32] = static_cast<double>(u.path.size());
    f[33] = static_cast<double>(u.query.size());
    f[34] = (rl.find("personal") != std::string::npos || rl.find(".bin") != std::string::npos ||
             rl.find("abuse") != std::string::npos)
                ? 1 : 0;
    bool has_www = false;
    for (const auto& label : split(u.host, '.'))
        if (label == "www") { has_www = true; break; }
    f[35] = has_www ? 0 : 1;
    f[36] = rl.find("ftp://") != std::string::npos ? 1 : 0;
    f[37] = rl.find(".js") != std::string::npos ? 1 : 0;
    f[38] = file_like_path(u.path) ? 1 : 0;
    f[39] = rl.find(".css") != std::string::npos ? 1 : 0;
    return f;
}

LexicalFeatures extract_lexical(const ParsedUrl& u, const RawUrl& raw, const LexicalContext& ctx) {
    LexicalFeatures out{};
    const auto ling = extract_linguistic(u, raw, ctx);
    std::copy(ling.begin(), ling.end(), out.begin());

    DomainWordFlags flags;
    if (!u.domain.empty() && ctx.dictionary && !ctx.dictionary->empty())
        flags = classify_domain_word(to_lower(u.domain), *ctx.dictionary);
    else
        flags.is_random = 1;
    out[40] = flags.is_english;
    out[41] = flags.is_meaningful;
    out[42] = flags.is_pronounceable;
    out[43] = flags.is_random;

    const std::string domain = to_lower(u.domain);
    out[44] = ctx.unigram ? ctx.unigram->score(domain) : 0.0;
    out[45] = ctx.bigram ? ctx.bigram->score(domain) : 0.0;
    out[46] = ctx.trigram ? ctx.trigram->score(domain) : 0.0;

    static const std::vector<std::string> kNoWords;
    static const std::unordered_set<std::string> kNoDomains;
    const auto sens = sensitive_and_suspicious(
        u.host + u.path, u.registered_domain(),
        ctx.sensitive_words ? *ctx.sensitive_words : kNoWords,
        ctx.suspicious_domains ? *ctx.suspicious_domains : kNoDomains);
    out[47] = sens.sensitive_word_count;
    out[48] = sens.in_suspicious_list;
    return out;
}

}  // namespace madurl
