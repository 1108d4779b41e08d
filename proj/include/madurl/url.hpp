#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "madurl/common.hpp"

namespace madurl {

struct UnparsableUrl : Error {
    explicit UnparsableUrl(const std::string& what) : Error("unparsable url: " + what) {}
};

// Raw input line, untouched apart from surrounding-whitespace trimming.
struct RawUrl {
    std::string text;
};

struct ParsedUrl {
    std::optional<std::string> scheme;     // lowercased
    std::string host;                      // lowercased, percent-decoded
    std::optional<std::string> subdomain;  // labels left of the registrable domain
    std::string domain;                    // registrable label (left of the TLD)
    std::optional<std::string> tld;        // longest known public suffix
    bool is_ip_host = false;
    std::optional<int> port;
    std::string path;      // may be empty
    std::string query;     // may be empty
    std::string fragment;  // may be empty

    // domain + "." + tld when the suffix is known, else just domain.
    std::string registered_domain() const {
        return tld ? domain + "." + *tld : domain;
    }

    std::string serialize() const;
};

// Known public-suffix snapshot, loaded from a one-suffix-per-line file
// ("//" comments). Bundled and versioned so extraction stays deterministic.
class TldTable {
  public:
    TldTable() = default;
    static TldTable load_file(const std::string& path);
    static TldTable from_lines(const std::vector<std::string>& suffixes);

    bool contains(const std::string& suffix) const { return suffixes_.count(suffix) > 0; }
    std::size_t size() const { return suffixes_.size(); }
    int max_labels() const { return max_labels_; }

  private:
    std::unordered_set<std::string> suffixes_;
    int max_labels_ = 0;
};

// (subdomain, domain, tld) — tld is the longest suffix of `host` present in
// the table; unknown suffixes degrade to treating the last label as domain.
struct HostSplit {
    std::optional<std::string> subdomain;
    std::string domain;
    std::optional<std::string> tld;
};
HostSplit effective_tld_split(const std::string& host, const TldTable& tlds);

bool is_ipv4(const std::string& host);
bool looks_like_ip_host(const std::string& host);  // dotted quad, www.-prefixed quad, or [IPv6]

std::string percent_decode(std::string_view s);

ParsedUrl parse_url(const RawUrl& raw, const TldTable& tlds);

}  // namespace madurl
