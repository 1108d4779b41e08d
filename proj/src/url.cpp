#include "madurl/url.hpp"

#include <algorithm>
#include <fstream>

namespace madurl {

std::string ParsedUrl::serialize() const {
    std::string out;
    if (scheme) out += *scheme + "://";
    out += host;
    if (port) out += ":" + std::to_string(*port);
    out += path;
    if (!query.empty()) out += "?" + query;
    if (!fragment.empty()) out += "#" + fragment;
    return out;
}

TldTable TldTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open TLD snapshot: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return from_lines(lines);
}

TldTable TldTable::from_lines(const std::vector<std::string>& suffixes) {
    TldTable t;
    for (const auto& raw : suffixes) {
        std::string s{trim(raw)};
        if (s.empty() || s.rfind("//", 0) == 0) continue;
        s = to_lower(s);
        t.suffixes_.insert(s);
        int labels = 1 + static_cast<int>(std::count(s.begin(), s.end(), '.'));
        t.max_labels_ = std::max(t.max_labels_, labels);
    }
    return t;
}

bool is_ipv4(const std::string& host) {
    auto labels = split(host, '.');
    if (labels.size() != 4) return false;
    for (const auto& l : labels) {
        if (l.empty() || l.size() > 3) return false;
        int v = 0;
        for (char c : l) {
            if (c < '0' || c > '9') return false;
            v = v * 10 + (c - '0');
        }
        if (v > 255) return false;
    }
    return true;
}

bool looks_like_ip_host(const std::string& host) {
    if (host.empty()) return false;
    if (host.front() == '[' && host.back() == ']') {
        // Bracketed IPv6: hex digits and colons only, at least one colon.
        const std::string inner = host.substr(1, host.size() - 2);
        if (inner.find(':') == std::string::npos) return false;
        return std::all_of(inner.begin(), inner.end(), [](char c) {
            return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || c == ':' || c == '.';
        });
    }
    if (is_ipv4(host)) return true;
    // The datasets carry spoofs like www.192.168.0.1: an IP used as hostname
    // behind extra labels still counts.
    auto labels = split(host, '.');
    if (labels.size() > 4) {
        std::string tail = labels[labels.size() - 4];
        for (std::size_t i = labels.size() - 3; i < labels.size(); ++i) tail += "." + labels[i];
        return is_ipv4(tail);
    }
    return false;
}

std::string percent_decode(std::string_view s) {
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = hex(s[i + 1]), lo = hex(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>(hi * 16 + lo);
                i += 2;
                continue;
            }
        }
        out += s[i];
    }
    return out;
}

HostSplit effective_tld_split(const std::string& host, const TldTable& tlds) {
    HostSplit out;
    auto labels = split(host, '.');
    // Longest known suffix wins; scan from the widest candidate down.
    const int max_try = std::min<int>(tlds.max_labels(), static_cast<int>(labels.size()) - 1);
    for (int n = max_try; n >= 1; --n) {
        std::string cand = labels[labels.size() - n];
        for (std::size_t i = labels.size() - n + 1; i < labels.size(); ++i) cand += "." + labels[i];
        if (tlds.contains(cand)) {
            out.tld = cand;
            out.domain = labels[labels.size() - n - 1];
            if (labels.size() > static_cast<std::size_t>(n) + 1) {
                // Everything left of the domain label.
                std::string sub = labels[0];
                for (std::size_t i = 1; i < labels.size() - n - 1; ++i) sub += "." + labels[i];
                out.subdomain = sub;
            }
            return out;
        }
    }
    // No known suffix: last label becomes the domain.
    out.domain = labels.back();
    if (labels.size() > 1) {
        std::string sub = labels[0];
        for (std::size_t i = 1; i + 1 < labels.size(); ++i) sub += "." + labels[i];
        out.subdomain = sub;
    }
    return out;
}

namespace {

bool valid_scheme(std::string_view s) {
    if (s.empty()) return false;
    if (!((s[0] >= 'a' && s[0] <= 'z') || (s[0] >= 'A' && s[0] <= 'Z'))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '+' || c == '-' || c == '.';
    });
}

}  // namespace

ParsedUrl parse_url(const RawUrl& raw, const TldTable& tlds) {
    std::string_view text = trim(raw.text);
    if (text.empty()) throw UnparsableUrl("empty input");

    ParsedUrl u;
    // Scheme, when "<scheme>://" leads. Scheme-less inputs are host-first:
    // the source datasets mix bare domains with full URLs.
    if (auto pos = text.find("://"); pos != std::string_view::npos && valid_scheme(text.substr(0, pos))) {
        u.scheme = to_lower(text.substr(0, pos));
        text.remove_prefix(pos + 3);
    }

    // Authority runs to the first of / ? #.
    std::size_t auth_end = text.find_first_of("/?#");
    std::string authority{text.substr(0, auth_end)};
    std::string_view rest = auth_end == std::string_view::npos ? std::string_view{} : text.substr(auth_end);

    // Anything before a '@' is userinfo; the real host follows it.
    if (auto at = authority.rfind('@'); at != std::string::npos) authority = authority.substr(at + 1);

    // Port split (skip for bracketed IPv6).
    std::string host_part = authority;
    if (!host_part.empty() && host_part.front() == '[') {
        auto close = host_part.find(']');
        if (close != std::string::npos && close + 1 < host_part.size() && host_part[close + 1] == ':') {
            std::string p = host_part.substr(close + 2);
            host_part = host_part.substr(0, close + 1);
            if (!p.empty() && std::all_of(p.begin(), p.end(), ::isdigit)) u.port = std::stoi(p);
        }
    } else if (auto colon = host_part.rfind(':'); colon != std::string::npos) {
        std::string p = host_part.substr(colon + 1);
        if (!p.empty() && p.size() <= 5 && std::all_of(p.begin(), p.end(), ::isdigit)) {
            u.port = std::stoi(p);
            host_part = host_part.substr(0, colon);
        }
    }

    u.host = to_lower(percent_decode(host_part));
    if (u.host.empty()) throw UnparsableUrl(raw.text);

    // Path / query / fragment.
    if (!rest.empty()) {
        std::size_t qpos = rest.find('?');
        std::size_t fpos = rest.find('#');
        std::size_t path_end = std::min(qpos == std::string_view::npos ? rest.size() : qpos,
                                        fpos == std::string_view::npos ? rest.size() : fpos);
        u.path = std::string(rest.substr(0, path_end));
        if (qpos != std::string_view::npos && (fpos == std::string_view::npos || qpos < fpos)) {
            std::size_t qend = fpos == std::string_view::npos ? rest.size() : fpos;
            u.query = std::string(rest.substr(qpos + 1, qend - qpos - 1));
        }
        if (fpos != std::string_view::npos) u.fragment = std::string(rest.substr(fpos + 1));
    }

    u.is_ip_host = looks_like_ip_host(u.host);
    if (u.is_ip_host) {
        u.domain = u.host;
    } else {
        HostSplit hs = effective_tld_split(u.host, tlds);
        u.subdomain = hs.subdomain;
        u.domain = hs.domain;
        u.tld = hs.tld;
    }
    return u;
}

}  // namespace madurl
