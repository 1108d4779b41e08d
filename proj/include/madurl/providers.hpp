#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "madurl/common.hpp"

namespace madurl {

// Raw WHOIS answer as captured; numeric encoding happens in feature space.
struct WhoisRecord {
    std::string ip;             // dotted quad
    long long asn = -1;
    std::string asn_country;    // two-letter code
    std::string asn_cidr;       // "a.b.c.d/n"
    std::string asn_postal;
    std::string creation_date;  // "YYYY-MM-DD"
    std::string updated_date;

    nlohmann::json to_json() const;
    static WhoisRecord from_json(const nlohmann::json& j);
};

// nullopt from any provider means "no answer" (unreachable, unknown, or not
// recorded); features fall back to the -1 sentinel.
class SearchProvider {
  public:
    virtual ~SearchProvider() = default;
    virtual std::optional<std::vector<std::string>> top_hosts(const std::string& domain) = 0;
};

class WhoisProvider {
  public:
    virtual ~WhoisProvider() = default;
    virtual std::optional<WhoisRecord> lookup(const std::string& domain) = 0;
};

class PageFetcher {
  public:
    virtual ~PageFetcher() = default;
    virtual std::optional<std::string> fetch(const std::string& url) = 0;
};

class DomainRegistry {
  public:
    virtual ~DomainRegistry() = default;
    virtual std::optional<bool> is_registered(const std::string& domain) = 0;
};

// ---------------------------------------------------------------------------
// Fixture store: one JSON document per provider kind, keyed by domain/URL,
// holding the raw response plus a capture timestamp. Read-only after load in
// replay mode; writes are serialized in record mode.
// ---------------------------------------------------------------------------

class FixtureStore {
  public:
    static const std::vector<std::string>& kinds();  // search whois pages registry

    FixtureStore() = default;
    static std::shared_ptr<FixtureStore> open(const std::string& dir);

    bool has_kind(const std::string& kind) const;
    std::optional<nlohmann::json> get(const std::string& kind, const std::string& key) const;
    void put(const std::string& kind, const std::string& key, nlohmann::json response,
             const std::string& captured_at = "1970-01-01T00:00:00Z");
    void save(const std::string& dir) const;
    std::size_t record_count(const std::string& kind) const;

  private:
    std::map<std::string, std::map<std::string, nlohmann::json>> records_;
    std::set<std::string> present_kinds_;
    mutable std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Provider implementations
// ---------------------------------------------------------------------------

// In-memory providers; back tests and record-mode sources.
class MapSearchProvider : public SearchProvider {
  public:
    std::map<std::string, std::vector<std::string>> results;
    std::optional<std::vector<std::string>> top_hosts(const std::string& domain) override {
        auto it = results.find(domain);
        if (it == results.end()) return std::nullopt;
        return it->second;
    }
};

class MapWhoisProvider : public WhoisProvider {
  public:
    std::map<std::string, WhoisRecord> records;
    std::optional<WhoisRecord> lookup(const std::string& domain) override {
        auto it = records.find(domain);
        if (it == records.end()) return std::nullopt;
        return it->second;
    }
};

class MapPageFetcher : public PageFetcher {
  public:
    std::map<std::string, std::string> pages;
    std::optional<std::string> fetch(const std::string& url) override {
        auto it = pages.find(url);
        if (it == pages.end()) return std::nullopt;
        return it->second;
    }
};

class MapDomainRegistry : public DomainRegistry {
  public:
    std::set<std::string> registered;
    std::optional<bool> is_registered(const std::string& domain) override {
        return registered.count(domain) > 0;
    }
};

enum class ProviderMode { Live, Record, Replay };
ProviderMode provider_mode_from_string(std::string_view s);
std::string to_string(ProviderMode m);

struct ProviderSuite {
    ProviderMode mode = ProviderMode::Replay;
    std::shared_ptr<SearchProvider> search;
    std::shared_ptr<WhoisProvider> whois;
    std::shared_ptr<PageFetcher> fetcher;
    std::shared_ptr<DomainRegistry> registry;

    std::shared_ptr<FixtureStore> store;  // record/replay backing
    std::string store_dir;

    void flush() const;  // persist recorded fixtures
};

// Replay wires every provider to the fixture store and touches no network.
// Record wraps the live sources and persists each answer. Live search, WHOIS
// and registry backends are site-specific and not bundled: they answer
// "unavailable", which the extractors turn into -1 sentinels.
ProviderSuite make_provider_suite(ProviderMode mode, const std::string& fixture_dir);

// Suite over explicit in-memory providers (tests, fixture building).
ProviderSuite make_static_suite(std::shared_ptr<SearchProvider> search,
                                std::shared_ptr<WhoisProvider> whois,
                                std::shared_ptr<PageFetcher> fetcher,
                                std::shared_ptr<DomainRegistry> registry);

// Wraps `inner` so every answer is recorded into `store`.
ProviderSuite make_recording_suite(const ProviderSuite& inner, std::shared_ptr<FixtureStore> store,
                                   const std::string& store_dir);

}  // namespace madurl
