#include "madurl/providers.hpp"

#include <filesystem>
#include <fstream>

namespace madurl {

using nlohmann::json;

json WhoisRecord::to_json() const {
    return json{{"ip", ip},
                {"asn", asn},
                {"asn_country", asn_country},
                {"asn_cidr", asn_cidr},
                {"asn_postal", asn_postal},
                {"creation_date", creation_date},
                {"updated_date", updated_date}};
}

WhoisRecord WhoisRecord::from_json(const json& j) {
    WhoisRecord r;
    r.ip = j.value("ip", "");
    r.asn = j.value("asn", -1LL);
    r.asn_country = j.value("asn_country", "");
    r.asn_cidr = j.value("asn_cidr", "");
    r.asn_postal = j.value("asn_postal", "");
    r.creation_date = j.value("creation_date", "");
    r.updated_date = j.value("updated_date", "");
    return r;
}

const std::vector<std::string>& FixtureStore::kinds() {
    static const std::vector<std::string> k = {"search", "whois", "pages", "registry"};
    return k;
}

std::shared_ptr<FixtureStore> FixtureStore::open(const std::string& dir) {
    auto store = std::make_shared<FixtureStore>();
    for (const auto& kind : kinds()) {
        const auto path = std::filesystem::path(dir) / (kind + ".json");
        std::ifstream in(path);
        if (!in) continue;
        json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded() || !doc.is_object()) throw Error("bad fixture file: " + path.string());
        store->present_kinds_.insert(kind);
        if (doc.contains("records"))
            for (auto& [key, rec] : doc["records"].items()) store->records_[kind][key] = rec;
    }
    return store;
}

bool FixtureStore::has_kind(const std::string& kind) const {
    std::lock_guard lock(mu_);
    return present_kinds_.count(kind) > 0;
}

std::optional<json> FixtureStore::get(const std::string& kind, const std::string& key) const {
    std::lock_guard lock(mu_);
    auto kit = records_.find(kind);
    if (kit == records_.end()) return std::nullopt;
    auto rit = kit->second.find(key);
    if (rit == kit->second.end()) return std::nullopt;
    if (!rit->second.contains("response")) return std::nullopt;
    return rit->second["response"];
}

void FixtureStore::put(const std::string& kind, const std::string& key, json response,
                       const std::string& captured_at) {
    std::lock_guard lock(mu_);
    present_kinds_.insert(kind);
    records_[kind][key] = json{{"captured_at", captured_at}, {"response", std::move(response)}};
}

void FixtureStore::save(const std::string& dir) const {
    std::lock_guard lock(mu_);
    std::filesystem::create_directories(dir);
    for (const auto& kind : present_kinds_) {
        json doc;
        doc["kind"] = kind;
        doc["records"] = json::object();
        auto it = records_.find(kind);
        if (it != records_.end())
            for (const auto& [key, rec] : it->second) doc["records"][key] = rec;
        std::ofstream out(std::filesystem::path(dir) / (kind + ".json"));
        out << doc.dump(2) << "\n";
    }
}

std::size_t FixtureStore::record_count(const std::string& kind) const {
    std::lock_guard lock(mu_);
    auto it = records_.find(kind);
    return it == records_.end() ? 0 : it->second.size();
}

ProviderMode provider_mode_from_string(std::string_view s) {
    if (s == "live") return ProviderMode::Live;
    if (s == "record") return ProviderMode::Record;
    if (s == "replay") return ProviderMode::Replay;
    throw Error("unknown provider mode: " + std::string(s));
}

std::string to_string(ProviderMode m) {
    switch (m) {
        case ProviderMode::Live: return "live";
        case ProviderMode::Record: return "record";
        case ProviderMode::Replay: return "replay";
    }
    return "replay";
}

namespace {

// --- replay providers -------------------------------------------------------

class ReplaySearch : public SearchProvider {
  public:
    explicit ReplaySearch(std::shared_ptr<const FixtureStore> s) : store_(std::move(s)) {}
    std::optional<std::vector<std::string>> top_hosts(const std::string& domain) override {
        auto rec = store_->get("search", domain);
        if (!rec || rec->is_null()) return std::nullopt;
        std::vector<std::string> hosts;
        for (const auto& h : (*rec)["hosts"]) hosts.push_back(h.get<std::string>());
        return hosts;
    }

  private:
    std::shared_ptr<const FixtureStore> store_;
};

class ReplayWhois : public WhoisProvider {
  public:
    explicit ReplayWhois(std::shared_ptr<const FixtureStore> s) : store_(std::move(s)) {}
    std::optional<WhoisRecord> lookup(const std::string& domain) override {
        auto rec = store_->get("whois", domain);
        if (!rec || rec->is_null()) return std::nullopt;
        return WhoisRecord::from_json(*rec);
    }

  private:
    std::shared_ptr<const FixtureStore> store_;
};

class ReplayPages : public PageFetcher {
  public:
    explicit ReplayPages(std::shared_ptr<const FixtureStore> s) : store_(std::move(s)) {}
    std::optional<std::string> fetch(const std::string& url) override {
        auto rec = store_->get("pages", url);
        if (!rec || rec->is_null()) return std::nullopt;
        return (*rec).value("body", std::string{});
    }

  private:
    std::shared_ptr<const FixtureStore> store_;
};

// A registry fixture lists the registered variants; absent keys mean
// "unregistered" as long as the registry document exists at all.
class ReplayRegistry : public DomainRegistry {
  public:
    explicit ReplayRegistry(std::shared_ptr<const FixtureStore> s) : store_(std::move(s)) {}
    std::optional<bool> is_registered(const std::string& domain) override {
        if (!store_->has_kind("registry")) return std::nullopt;
        auto rec = store_->get("registry", domain);
        if (!rec || rec->is_null()) return false;
        return (*rec).value("registered", false);
    }

  private:
    std::shared_ptr<const FixtureStore> store_;
};

// --- recording wrappers ------------------------------------------------------

class RecordingSearch : public SearchProvider {
  public:
    RecordingSearch(std::shared_ptr<SearchProvider> inner, std::shared_ptr<FixtureStore> store)
        : inner_(std::move(inner)), store_(std::move(store)) {}
    std::optional<std::vector<std::string>> top_hosts(const std::string& domain) override {
        auto r = inner_->top_hosts(domain);
        store_->put("search", domain, r ? json{{"hosts", *r}} : json(nullptr));
        return r;
    }

  private:
    std::shared_ptr<SearchProvider> inner_;
    std::shared_ptr<FixtureStore> store_;
};

class RecordingWhois : public WhoisProvider {
  public:
    RecordingWhois(std::shared_ptr<WhoisProvider> inner, std::shared_ptr<FixtureStore> store)
        : inner_(std::move(inner)), store_(std::move(store)) {}
    std::optional<WhoisRecord> lookup(const std::string& domain) override {
        auto r = inner_->lookup(domain);
        store_->put("whois", domain, r ? r->to_json() : json(nullptr));
        return r;
    }

  private:
    std::shared_ptr<WhoisProvider> inner_;
    std::shared_ptr<FixtureStore> store_;
};

class RecordingPages : public PageFetcher {
  public:
    RecordingPages(std::shared_ptr<PageFetcher> inner, std::shared_ptr<FixtureStore> store)
        : inner_(std::move(inner)), store_(std::move(store)) {}
    std::optional<std::string> fetch(const std::string& url) override {
        auto r = inner_->fetch(url);
        store_->put("pages", url, r ? json{{"body", *r}} : json(nullptr));
        return r;
    }

  private:
    std::shared_ptr<PageFetcher> inner_;
    std::shared_ptr<FixtureStore> store_;
};

class RecordingRegistry : public DomainRegistry {
  public:
    RecordingRegistry(std::shared_ptr<DomainRegistry> inner, std::shared_ptr<FixtureStore> store)
        : inner_(std::move(inner)), store_(std::move(store)) {}
    std::optional<bool> is_registered(const std::string& domain) override {
        auto r = inner_->is_registered(domain);
        if (r) store_->put("registry", domain, json{{"registered", *r}});
        return r;
    }

  private:
    std::shared_ptr<DomainRegistry> inner_;
    std::shared_ptr<FixtureStore> store_;
};

// --- offline "live" stubs ----------------------------------------------------

class UnavailableSearch : public SearchProvider {
    std::optional<std::vector<std::string>> top_hosts(const std::string&) override { return std::nullopt; }
};
class UnavailableWhois : public WhoisProvider {
    std::optional<WhoisRecord> lookup(const std::string&) override { return std::nullopt; }
};
class UnavailableRegistry : public DomainRegistry {
    std::optional<bool> is_registered(const std::string&) override { return std::nullopt; }
};
class UnavailableFetcher : public PageFetcher {
    std::optional<std::string> fetch(const std::string&) override { return std::nullopt; }
};

}  // namespace

void ProviderSuite::flush() const {
    if (mode == ProviderMode::Record && store && !store_dir.empty()) store->save(store_dir);
}

ProviderSuite make_provider_suite(ProviderMode mode, const std::string& fixture_dir) {
    ProviderSuite suite;
    suite.mode = mode;
    switch (mode) {
        case ProviderMode::Replay: {
            // Replay never constructs a network-capable provider.
            if (fixture_dir.empty()) throw Error("replay mode requires a fixture directory");
            suite.store = FixtureStore::open(fixture_dir);
            suite.store_dir = fixture_dir;
            suite.search = std::make_shared<ReplaySearch>(suite.store);
            suite.whois = std::make_shared<ReplayWhois>(suite.store);
            suite.fetcher = std::make_shared<ReplayPages>(suite.store);
            suite.registry = std::make_shared<ReplayRegistry>(suite.store);
            break;
        }
        case ProviderMode::Live: {
            suite.search = std::make_shared<UnavailableSearch>();
            suite.whois = std::make_shared<UnavailableWhois>();
            suite.fetcher = std::make_shared<UnavailableFetcher>();
            suite.registry = std::make_shared<UnavailableRegistry>();
            break;
        }
        case ProviderMode::Record: {
            if (fixture_dir.empty()) throw Error("record mode requires a fixture directory");
            ProviderSuite live = make_provider_suite(ProviderMode::Live, "");
            auto store = FixtureStore::open(fixture_dir);  // extend an existing store
            suite = make_recording_suite(live, store, fixture_dir);
            break;
        }
    }
    return suite;
}

ProviderSuite make_static_suite(std::shared_ptr<SearchProvider> search,
                                std::shared_ptr<WhoisProvider> whois,
                                std::shared_ptr<PageFetcher> fetcher,
                                std::shared_ptr<DomainRegistry> registry) {
    ProviderSuite suite;
    suite.mode = ProviderMode::Live;
    suite.search = std::move(search);
    suite.whois = std::move(whois);
    suite.fetcher = std::move(fetcher);
    suite.registry = std::move(registry);
    return suite;
}

ProviderSuite make_recording_suite(const ProviderSuite& inner, std::shared_ptr<FixtureStore> store,
                                   const std::string& store_dir) {
    ProviderSuite suite;
    suite.mode = ProviderMode::Record;
    suite.store = store;
    suite.store_dir = store_dir;
    suite.search = std::make_shared<RecordingSearch>(inner.search, store);
    suite.whois = std::make_shared<RecordingWhois>(inner.whois, store);
    suite.fetcher = std::make_shared<RecordingPages>(inner.fetcher, store);
    suite.registry = std::make_shared<RecordingRegistry>(inner.registry, store);
    return suite;
}

}  // namespace madurl
