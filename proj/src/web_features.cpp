#include "madurl/web_features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace madurl {

int levenshtein(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0) return static_cast<int>(m);
    if (m == 0) return static_cast<int>(n);
    std::vector<int> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double shannon_entropy(const std::string& s) {
    if (s.empty()) throw EmptyString{};
    std::array<long long, 256> freq{};
    for (unsigned char c : s) ++freq[c];
    const double n = static_cast<double>(s.size());
    double h = 0.0;
    for (long long f : freq) {
        if (f == 0) continue;
        const double p = static_cast<double>(f) / n;
        h -= p * std::log2(p);
    }
    return h;
}

HomoglyphTable load_homoglyphs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open homoglyph table: " + path);
    HomoglyphTable table;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view v = trim(line);
        if (v.empty() || v.rfind("//", 0) == 0) continue;
        auto tab = v.find('\t');
        if (tab == std::string_view::npos || tab == 0) continue;
        const char key = v[0];
        for (const auto& rep : split(trim(v.substr(tab + 1)), ' '))
            if (!rep.empty()) table[key].push_back(rep);
    }
    return table;
}

const std::vector<TyposquatKind>& typosquat_kinds() {
    static const std::vector<TyposquatKind> kinds = {
        TyposquatKind::Hyphenation, TyposquatKind::Homoglyph,   TyposquatKind::VowelSwap,
        TyposquatKind::Bitsquatting, TyposquatKind::Insertion,  TyposquatKind::Omission,
        TyposquatKind::Repetition,  TyposquatKind::Replacement, TyposquatKind::Subdomain,
        TyposquatKind::Transposition, TyposquatKind::Addition,
    };
    return kinds;
}

TyposquatKind typosquat_kind_from_string(const std::string& s) {
    if (s == "hyphenation") return TyposquatKind::Hyphenation;
    if (s == "homoglyph") return TyposquatKind::Homoglyph;
    if (s == "vowel_swap") return TyposquatKind::VowelSwap;
    if (s == "bitsquatting") return TyposquatKind::Bitsquatting;
    if (s == "insertion") return TyposquatKind::Insertion;
    if (s == "omission") return TyposquatKind::Omission;
    if (s == "repetition") return TyposquatKind::Repetition;
    if (s == "replacement") return TyposquatKind::Replacement;
    if (s == "subdomain") return TyposquatKind::Subdomain;
    if (s == "transposition") return TyposquatKind::Transposition;
    if (s == "addition") return TyposquatKind::Addition;
    throw UnknownKind(s);
}

std::string to_string(TyposquatKind k) {
    switch (k) {
        case TyposquatKind::Hyphenation: return "hyphenation";
        case TyposquatKind::Homoglyph: return "homoglyph";
        case TyposquatKind::VowelSwap: return "vowel_swap";
        case TyposquatKind::Bitsquatting: return "bitsquatting";
        case TyposquatKind::Insertion: return "insertion";
        case TyposquatKind::Omission: return "omission";
        case TyposquatKind::Repetition: return "repetition";
        case TyposquatKind::Replacement: return "replacement";
        case TyposquatKind::Subdomain: return "subdomain";
        case TyposquatKind::Transposition: return "transposition";
        case TyposquatKind::Addition: return "addition";
    }
    return "?";
}

namespace {

bool label_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

const std::string& keyboard_adjacent(char c) {
    static const std::unordered_map<char, std::string> qwerty = {
        {'1', "2q"},     {'2', "3wq1"},   {'3', "4ew2"},  {'4', "5re3"},  {'5', "6tr4"},
        {'6', "7yt5"},   {'7', "8uy6"},   {'8', "9iu7"},  {'9', "0oi8"},  {'0', "po9"},
        {'q', "12wa"},   {'w', "3esaq2"}, {'e', "4rdsw3"}, {'r', "5tfde4"}, {'t', "6ygfr5"},
        {'y', "7uhgt6"}, {'u', "8ijhy7"}, {'i', "9okju8"}, {'o', "0plki9"}, {'p', "lo0"},
        {'a', "qwsz"},   {'s', "edxzaw"}, {'d', "rfcxse"}, {'f', "tgvcdr"}, {'g', "yhbvft"},
        {'h', "ujnbgy"}, {'j', "ikmnhu"}, {'k', "olmji"},  {'l', "kop"},    {'z', "asx"},
        {'x', "zsdc"},   {'c', "xdfv"},   {'v', "cfgb"},   {'b', "vghn"},   {'n', "bhjm"},
        {'m', "njk"},
    };
    static const std::string empty;
    auto it = qwerty.find(c);
    return it == qwerty.end() ? empty : it->second;
}

bool valid_candidate(const std::string& s, bool allow_dot) {
    if (s.empty()) return false;
    if (s.front() == '-' || s.back() == '-' || s.front() == '.' || s.back() == '.') return false;
    for (char c : s)
        if (!label_char(c) && !(allow_dot && c == '.')) return false;
    if (allow_dot && s.find("..") != std::string::npos) return false;
    return true;
}

}  // namespace

std::set<std::string> typosquat_variants(const std::string& domain, TyposquatKind kind,
                                         const HomoglyphTable* homoglyphs) {
    std::set<std::string> out;
    const std::size_t n = domain.size();
    const bool allow_dot = kind == TyposquatKind::Subdomain;
    auto add = [&](const std::string& cand) {
        if (cand != domain && valid_candidate(cand, allow_dot)) out.insert(cand);
    };

    switch (kind) {
        case TyposquatKind::Omission:
            for (std::size_t i = 0; i < n; ++i) add(domain.substr(0, i) + domain.substr(i + 1));
            break;
        case TyposquatKind::Transposition:
            for (std::size_t i = 0; i + 1 < n; ++i) {
                std::string s = domain;
                std::swap(s[i], s[i + 1]);
                add(s);
            }
            break;
        case TyposquatKind::Repetition:
            for (std::size_t i = 0; i < n; ++i)
                add(domain.substr(0, i + 1) + domain[i] + domain.substr(i + 1));
            break;
        case TyposquatKind::Insertion:
            for (std::size_t i = 0; i < n; ++i)
                for (char c : keyboard_adjacent(domain[i])) {
                    add(domain.substr(0, i) + c + domain.substr(i));
                    add(domain.substr(0, i + 1) + c + domain.substr(i + 1));
                }
            break;
        case TyposquatKind::Replacement:
            for (std::size_t i = 0; i < n; ++i)
                for (char c : keyboard_adjacent(domain[i])) {
                    std::string s = domain;
                    s[i] = c;
                    add(s);
                }
            break;
        case TyposquatKind::VowelSwap: {
            static const std::string vowels = "aeiou";
            for (std::size_t i = 0; i < n; ++i) {
                if (vowels.find(domain[i]) == std::string::npos) continue;
                for (char v : vowels) {
                    if (v == domain[i]) continue;
                    std::string s = domain;
                    s[i] = v;
                    add(s);
                }
            }
            break;
        }
        case TyposquatKind::Hyphenation:
            for (std::size_t i = 1; i < n; ++i) {
                if (domain[i - 1] == '-' || domain[i] == '-') continue;
                add(domain.substr(0, i) + "-" + domain.substr(i));
            }
            break;
        case TyposquatKind::Subdomain:
            for (std::size_t i = 1; i < n; ++i) {
                if (domain[i - 1] == '-' || domain[i] == '-') continue;
                add(domain.substr(0, i) + "." + domain.substr(i));
            }
            break;
        case TyposquatKind::Addition:
            for (char c = 'a'; c <= 'z'; ++c) add(domain + c);
            for (char c = '0'; c <= '9'; ++c) add(domain + c);
            break;
        case TyposquatKind::Bitsquatting:
            for (std::size_t i = 0; i < n; ++i)
                for (int bit = 0; bit < 8; ++bit) {
                    const char flipped = static_cast<char>(domain[i] ^ (1 << bit));
                    if (!label_char(flipped)) continue;
                    std::string s = domain;
                    s[i] = flipped;
                    add(s);
                }
            break;
        case TyposquatKind::Homoglyph:
            if (homoglyphs)
                for (std::size_t i = 0; i < n; ++i) {
                    auto it = homoglyphs->find(domain[i]);
                    if (it == homoglyphs->end()) continue;
                    for (const auto& rep : it->second)
                        add(domain.substr(0, i) + rep + domain.substr(i + 1));
                }
            break;
    }
    return out;
}

int typosquat_feature(const std::string& domain, TyposquatKind kind, DomainRegistry& registry,
                      const HomoglyphTable* homoglyphs) {
    const auto variants = typosquat_variants(domain, kind, homoglyphs);
    if (variants.empty())  // nothing to squat (e.g. one-char label): probe availability only
        return registry.is_registered(domain).has_value() ? 0 : -1;
    int count = 0;
    for (const auto& variant : variants) {
        auto reg = registry.is_registered(variant);
        if (!reg) return -1;
        if (*reg) ++count;
    }
    return count;
}

int search_hit_count(const std::string& registered_domain, SearchProvider& search,
                     const TldTable& tlds) {
    auto hosts = search.top_hosts(registered_domain);
    if (!hosts) return -1;
    int hits = 0;
    std::size_t considered = 0;
    for (const auto& host : *hosts) {
        if (considered++ >= 60) break;
        const std::string h = to_lower(host);
        HostSplit hs = effective_tld_split(h, tlds);
        const std::string reg = hs.tld ? hs.domain + "." + *hs.tld : hs.domain;
        if (reg == registered_domain) ++hits;
    }
    return hits;
}

namespace {

double encode_ipv4(const std::string& ip) {
    if (!is_ipv4(ip)) return -1;
    auto parts = split(ip, '.');
    double v = 0;
    for (const auto& p : parts) v = v * 256.0 + std::stod(p);
    return v;
}

double encode_country(const std::string& cc) {
    if (cc.size() != 2) return -1;
    const std::string c = to_lower(cc);
    if (c[0] < 'a' || c[0] > 'z' || c[1] < 'a' || c[1] > 'z') return -1;
    return (c[0] - 'a') * 26 + (c[1] - 'a');
}

}  // namespace

std::array<double, 8> host_features(const std::string& registered_domain, WhoisProvider& whois,
                                    std::int64_t today_epoch_day) {
    std::array<double, 8> f;
    f.fill(-1);
    auto rec = whois.lookup(registered_domain);
    if (!rec) return f;

    f[0] = encode_ipv4(rec->ip);
    f[1] = rec->asn >= 0 ? static_cast<double>(rec->asn) : -1;
    f[2] = encode_country(rec->asn_country);
    if (auto slash = rec->asn_cidr.find('/'); slash != std::string::npos)
        f[3] = encode_ipv4(rec->asn_cidr.substr(0, slash));
    if (!rec->asn_postal.empty()) f[4] = static_cast<double>(fnv1a32(rec->asn_postal) % 1048576u);
    auto created = parse_epoch_day(rec->creation_date);
    auto updated = parse_epoch_day(rec->updated_date);
    if (created) f[5] = static_cast<double>(*created);
    if (updated) f[6] = static_cast<double>(*updated);
    if (created && today_epoch_day >= *created)
        f[7] = static_cast<double>(today_epoch_day - *created);
    return f;
}

namespace {

// Opening-tag count: "<name" followed by a delimiter.
int count_tag(const std::string& body_lower, const std::string& name) {
    const std::string needle = "<" + name;
    int count = 0;
    std::size_t pos = 0;
    while ((pos = body_lower.find(needle, pos)) != std::string::npos) {
        const std::size_t after = pos + needle.size();
        if (after >= body_lower.size() || body_lower[after] == ' ' || body_lower[after] == '>' ||
            body_lower[after] == '/' || body_lower[after] == '\t' || body_lower[after] == '\n' ||
            body_lower[after] == '\r')
            ++count;
        pos = after;
    }
    return count;
}

bool count_substr_any(const std::string& body, const std::vector<std::string>& needles) {
    for (const auto& n : needles)
        if (body.find(n) != std::string::npos) return true;
    return false;
}

bool title_missing_or_empty(const std::string& body_lower) {
    std::size_t pos = body_lower.find("<title");
    if (pos == std::string::npos) return true;
    std::size_t open_end = body_lower.find('>', pos);
    if (open_end == std::string::npos) return true;
    std::size_t close = body_lower.find("</title", open_end);
    if (close == std::string::npos) return true;
    for (std::size_t i = open_end + 1; i < close; ++i)
        if (!std::isspace(static_cast<unsigned char>(body_lower[i]))) return false;
    return true;
}

std::string strip_tags(const std::string& html) {
    std::string out;
    bool in_tag = false;
    for (char c : html) {
        if (c == '<') in_tag = true;
        else if (c == '>') in_tag = false;
        else if (!in_tag) out += c;
    }
    return out;
}

bool image_only_form(const std::string& body_lower) {
    std::size_t pos = 0;
    while ((pos = body_lower.find("<form", pos)) != std::string::npos) {
        std::size_t end = body_lower.find("</form>", pos);
        if (end == std::string::npos) break;
        const std::string block = body_lower.substr(pos, end - pos);
        const std::string text = strip_tags(block);
        const bool has_img = block.find("<img") != std::string::npos;
        const bool text_empty = std::all_of(text.begin(), text.end(), [](unsigned char c) {
            return std::isspace(c);
        });
        if (has_img && text_empty) return true;
        pos = end + 1;
    }
    return false;
}

}  // namespace

std::array<double, 18> content_features(const ParsedUrl& u, PageFetcher& fetcher) {
    std::array<double, 18> f;
    f.fill(-1);
    auto body = fetcher.fetch(u.serialize());
    if (!body) return f;
    const std::string b = to_lower(*body);

    f[0] = count_tag(b, "img");
    f[1] = count_tag(b, "a") + count_tag(b, "link");
    int params = 0;
    for (const auto& part : split(u.query, '&'))
        if (!part.empty()) ++params;
    f[2] = params;
    f[3] = u.fragment.empty() ? 0 : 1;
    f[4] = count_tag(b, "body");
    f[5] = count_tag(b, "meta");
    f[6] = count_tag(b, "div");
    f[7] = b.find("window.status") != std::string::npos ? 1 : 0;
    f[8] = count_substr_any(b, {"event.button==2", "event.button == 2", "oncontextmenu"}) ? 1 : 0;
    f[9] = count_substr_any(b, {"window.open(", "showmodaldialog("}) ? 1 : 0;
    f[10] = b.find("mailto:") != std::string::npos ? 1 : 0;
    f[11] = (count_tag(b, "frame") + count_tag(b, "iframe")) > 0 ? 1 : 0;
    f[12] = title_missing_or_empty(b) ? 1 : 0;
    f[13] = count_occurrences(b, "eval(");
    f[14] = count_occurrences(b, "escape(");
    f[15] = count_occurrences(b, "exec(");
    f[16] = count_occurrences(b, "search(");
    f[17] = image_only_form(b) ? 1 : 0;
    return f;
}

WebFeatures extract_web(const ParsedUrl& u, const RawUrl& raw, const WebContext& ctx) {
    WebFeatures f{};
    f.fill(-1);
    const ProviderSuite* p = ctx.providers;
    const std::string reg = u.registered_domain();

    // Deep-web: Levenshtein against the closest search result, falling back
    // to the suspicious list when search is unavailable.
    int lev = -1;
    if (p && p->search && ctx.tlds) {
        auto hosts = p->search->top_hosts(reg);
        if (hosts) {
            int best = -1;
            std::size_t considered = 0;
            for (const auto& host : *hosts) {
                if (considered++ >= 60) break;
                HostSplit hs = effective_tld_split(to_lower(host), *ctx.tlds);
                const std::string rr = hs.tld ? hs.domain + "." + *hs.tld : hs.domain;
                const int d = levenshtein(reg, rr);
                if (best < 0 || d < best) best = d;
            }
            lev = best < 0 ? -1 : best;
        } else if (ctx.suspicious_domains && !ctx.suspicious_domains->empty()) {
            int best = -1;
            for (const auto& s : *ctx.suspicious_domains) {
                const int d = levenshtein(reg, s);
                if (best < 0 || d < best) best = d;
            }
            lev = best;
        }
    }
    f[0] = lev;
    f[1] = shannon_entropy(std::string(trim(raw.text)));

    const bool squattable = !u.is_ip_host && !u.domain.empty();
    for (std::size_t i = 0; i < typosquat_kinds().size(); ++i) {
        if (!p || !p->registry) { f[2 + i] = -1; continue; }
        if (!squattable) {
            f[2 + i] = p->registry->is_registered(u.domain).has_value() ? 0 : -1;
            continue;
        }
        f[2 + i] = typosquat_feature(u.domain, typosquat_kinds()[i], *p->registry, ctx.homoglyphs);
    }

    f[13] = (p && p->search && ctx.tlds) ? search_hit_count(reg, *p->search, *ctx.tlds) : -1;

    if (p && p->whois) {
        const auto host = host_features(reg, *p->whois, ctx.today_epoch_day);
        std::copy(host.begin(), host.end(), f.begin() + 14);
    }
    if (p && p->fetcher) {
        const auto content = content_features(u, *p->fetcher);
        std::copy(content.begin(), content.end(), f.begin() + 22);
    }
    return f;
}

}  // namespace madurl
