#include "madurl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "madurl/parallel.hpp"

namespace madurl {

namespace {

// Minimal RFC-4180 row reader: quoted fields with doubled quotes.
std::vector<std::string> parse_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { field += '"'; ++i; }
                else quoted = false;
            } else field += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

LabeledDataset ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(in, line)) throw EmptyFile(path);

    const auto header = parse_csv_row(line);
    int url_col = -1, label_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = to_lower(trim(header[i]));
        if (h == "url") url_col = static_cast<int>(i);
        if (h == "label") label_col = static_cast<int>(i);
    }
    if (url_col < 0) throw MissingColumn("url");
    if (label_col < 0) throw MissingColumn("label");

    LabeledDataset d;
    d.name = path;
    d.provenance.push_back(path);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = parse_csv_row(line);
        if (static_cast<int>(fields.size()) <= std::max(url_col, label_col)) { ++d.skipped; continue; }
        const std::string url{trim(fields[url_col])};
        const std::string label{trim(fields[label_col])};
        if (url.empty() || (label != "0" && label != "1")) { ++d.skipped; continue; }
        d.rows.push_back({url, label == "1" ? 1 : 0, std::nullopt});
    }
    return d;
}

void write_csv(const LabeledDataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << "url,label\n";
    for (const auto& r : d.rows) out << csv_escape(r.url) << "," << r.label << "\n";
}

void write_features_csv(const LabeledDataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << "url,label";
    for (const auto& slot : feature_schema()) out << "," << slot.name;
    out << "\n";
    for (const auto& r : d.rows) {
        if (!r.features) continue;
        out << csv_escape(r.url) << "," << r.label;
        for (double v : r.features->values) out << "," << fmt_double(v);
        out << "\n";
    }
}

LabeledDataset read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open features: " + path);
    std::string line;
    if (!std::getline(in, line)) throw EmptyFile(path);
    const auto header = parse_csv_row(line);
    if (header.size() != 2 + static_cast<std::size_t>(kFeatureSlots))
        throw SchemaMismatch(path + " has " + std::to_string(header.size()) + " columns");
    for (int i = 0; i < kFeatureSlots; ++i)
        if (header[2 + i] != feature_schema()[i].name)
            throw SchemaMismatch("column " + std::to_string(2 + i) + " is " + header[2 + i]);

    LabeledDataset d;
    d.name = path;
    d.provenance.push_back(path);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = parse_csv_row(line);
        if (fields.size() != header.size()) { ++d.skipped; continue; }
        DatasetRow row;
        row.url = fields[0];
        row.label = fields[1] == "1" ? 1 : 0;
        FeatureVector v;
        v.values.resize(kFeatureSlots);
        bool ok = true;
        for (int i = 0; i < kFeatureSlots; ++i) {
            try {
                v.values[i] = std::stod(fields[2 + i]);
            } catch (...) { ok = false; break; }
        }
        if (!ok) { ++d.skipped; continue; }
        row.features = std::move(v);
        d.rows.push_back(std::move(row));
    }
    return d;
}

LabeledDataset preprocess(const LabeledDataset& d, std::uint64_t seed) {
    static const TldTable kNoTlds;  // host extraction needs no suffix table
    LabeledDataset out;
    out.name = d.name;
    out.provenance = d.provenance;
    out.seed = seed;
    out.skipped = d.skipped;

    std::unordered_set<std::string> seen_hosts;
    for (const auto& r : d.rows) {
        if (trim(r.url).empty()) { ++out.skipped; continue; }
        std::string host;
        try {
            host = parse_url(RawUrl{r.url}, kNoTlds).host;
        } catch (const UnparsableUrl&) {
            ++out.skipped;
            continue;
        }
        if (!seen_hosts.insert(host).second) continue;  // first occurrence wins
        out.rows.push_back(r);
    }
    Rng rng(derive_seed(seed, "preprocess/shuffle"));
    rng.shuffle(out.rows);
    return out;
}

LabeledDataset merge_balanced(const LabeledDataset& benign, const LabeledDataset& malicious,
                              std::uint64_t seed) {
    const std::size_t n_each = std::min(benign.rows.size() / 2, malicious.rows.size());
    if (n_each == 0) throw InsufficientRows("merge_balanced needs non-empty classes");

    auto sample = [&](const LabeledDataset& src, int label, std::string_view stream) {
        std::vector<std::size_t> idx(src.rows.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng rng(derive_seed(seed, stream));
        rng.shuffle(idx);
        std::vector<DatasetRow> rows;
        rows.reserve(n_each);
        for (std::size_t i = 0; i < n_each; ++i) {
            DatasetRow r = src.rows[idx[i]];
            r.label = label;
            rows.push_back(std::move(r));
        }
        return rows;
    };

    LabeledDataset out;
    out.name = benign.name + "+" + malicious.name;
    out.provenance = benign.provenance;
    out.provenance.insert(out.provenance.end(), malicious.provenance.begin(),
                          malicious.provenance.end());
    out.seed = seed;
    auto b = sample(benign, 0, "merge/benign");
    auto m = sample(malicious, 1, "merge/malicious");
    out.rows.insert(out.rows.end(), b.begin(), b.end());
    out.rows.insert(out.rows.end(), m.begin(), m.end());
    Rng rng(derive_seed(seed, "merge/shuffle"));
    rng.shuffle(out.rows);
    return out;
}

double quantile_linear(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ScalerState ScalerState::fit(const LabeledDataset& d) {
    std::size_t with_features = 0;
    std::size_t slots = 0;
    for (const auto& r : d.rows) {
        if (!r.features) continue;
        ++with_features;
        slots = r.features->values.size();
    }
    if (with_features < 2) throw NoFeatures{};

    ScalerState s;
    s.median_.resize(slots, 0.0);
    s.iqr_.resize(slots, 0.0);
    for (std::size_t j = 0; j < slots; ++j) {
        std::vector<double> col;
        col.reserve(with_features);
        for (const auto& r : d.rows) {
            if (!r.features) continue;
            const double v = r.features->values[j];
            if (v == -1.0) continue;  // missing-provider sentinel
            col.push_back(v);
        }
        if (col.empty()) continue;
        s.median_[j] = quantile_linear(col, 0.5);
        s.iqr_[j] = quantile_linear(col, 0.75) - quantile_linear(col, 0.25);
    }
    return s;
}

FeatureVector ScalerState::apply(const FeatureVector& v) const {
    if (v.values.size() != median_.size())
        throw SchemaMismatch("scaler fitted on different width");
    FeatureVector out = v;
    for (std::size_t j = 0; j < out.values.size(); ++j)
        if (iqr_[j] > 0.0) out.values[j] = (out.values[j] - median_[j]) / iqr_[j];
    return out;
}

void ScalerState::apply_in_place(LabeledDataset& d) const {
    for (auto& r : d.rows)
        if (r.features) r.features = apply(*r.features);
}

nlohmann::json ScalerState::to_json() const {
    return nlohmann::json{{"median", median_}, {"iqr", iqr_}};
}

ScalerState ScalerState::from_json(const nlohmann::json& j) {
    ScalerState s;
    s.median_ = j.at("median").get<std::vector<double>>();
    s.iqr_ = j.at("iqr").get<std::vector<double>>();
    return s;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& d, double train_fraction,
                                                std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("split: fraction must be in (0,1)");
    if (d.rows.size() < 2) throw TooFewRows("split needs >= 2 rows");

    LabeledDataset train, test;
    train.name = d.name + "/train";
    test.name = d.name + "/test";
    train.provenance = test.provenance = d.provenance;
    train.seed = test.seed = seed;

    for (int label : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < d.rows.size(); ++i)
            if (d.rows[i].label == label) idx.push_back(i);
        if (idx.empty()) continue;
        Rng rng(derive_seed(seed, "split", static_cast<std::uint64_t>(label)));
        rng.shuffle(idx);
        const auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_train ? train : test).rows.push_back(d.rows[idx[i]]);
    }
    if (train.rows.empty() || test.rows.empty()) throw TooFewRows("empty split side");
    return {std::move(train), std::move(test)};
}

std::vector<std::vector<std::size_t>> kfold(const LabeledDataset& d, int k, std::uint64_t seed) {
    if (k < 2) throw Error("kfold: k must be >= 2");
    if (d.rows.size() < static_cast<std::size_t>(k)) throw TooFewRows("kfold needs >= k rows");

    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    std::size_t cursor = 0;
    // Dealing both classes round-robin with a running cursor keeps fold sizes
    // within one of each other while staying stratified.
    for (int label : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < d.rows.size(); ++i)
            if (d.rows[i].label == label) idx.push_back(i);
        Rng rng(derive_seed(seed, "kfold", static_cast<std::uint64_t>(label)));
        rng.shuffle(idx);
        for (std::size_t i : idx) {
            folds[cursor % folds.size()].push_back(i);
            ++cursor;
        }
    }
    return folds;
}

namespace {

bool special_char(char c) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    return c >= 33 && c <= 126 && !alnum;
}

ClassProfile profile_class(const LabeledDataset& d, int label) {
    static const TldTable kNoTlds;
    ClassProfile p;
    double len_sum = 0, special_sum = 0, path_sum = 0;
    std::size_t ip_hosts = 0, max_len = 0;
    std::vector<std::size_t> lengths;
    for (const auto& r : d.rows) {
        if (r.label != label) continue;
        ++p.count;
        const std::string url{trim(r.url)};
        len_sum += static_cast<double>(url.size());
        lengths.push_back(url.size());
        max_len = std::max(max_len, url.size());
        special_sum += static_cast<double>(std::count_if(url.begin(), url.end(), special_char));
        try {
            const ParsedUrl u = parse_url(RawUrl{url}, kNoTlds);
            path_sum += static_cast<double>(u.path.size());
            ip_hosts += u.is_ip_host;
        } catch (const UnparsableUrl&) {
        }
    }
    if (p.count == 0) return p;
    const double n = static_cast<double>(p.count);
    p.mean_url_length = len_sum / n;
    p.mean_special_chars = special_sum / n;
    p.mean_path_length = path_sum / n;
    p.ip_host_fraction = static_cast<double>(ip_hosts) / n;

    constexpr std::size_t kBucket = 10;
    const std::size_t buckets = max_len / kBucket + 1;
    std::vector<double> counts(buckets, 0.0);
    for (std::size_t len : lengths) counts[len / kBucket] += 1.0;
    for (std::size_t b = 0; b < buckets; ++b)
        p.histogram.push_back({static_cast<double>(b * kBucket),
                               static_cast<double>((b + 1) * kBucket), counts[b]});
    return p;
}

}  // namespace

ProfileReport profile(const LabeledDataset& d) {
    ProfileReport rep;
    rep.benign = profile_class(d, 0);
    rep.malicious = profile_class(d, 1);
    return rep;
}

nlohmann::json ProfileReport::to_json() const {
    auto cls = [](const ClassProfile& p) {
        return nlohmann::json{{"count", p.count},
                              {"mean_url_length", p.mean_url_length},
                              {"mean_special_chars", p.mean_special_chars},
                              {"mean_path_length", p.mean_path_length},
                              {"ip_host_fraction", p.ip_host_fraction}};
    };
    return nlohmann::json{{"benign", cls(benign)}, {"malicious", cls(malicious)}};
}

std::string ProfileReport::histogram_csv(const ClassProfile& p) {
    std::string out = "bucket_lo,bucket_hi,count\n";
    for (const auto& b : p.histogram)
        out += fmt_double(b[0]) + "," + fmt_double(b[1]) + "," + fmt_double(b[2]) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& common_words() {
    // Subset of the bundled dictionary; keeps the generator self-contained.
    static const std::vector<std::string> words = {
        "apple",  "house",  "water",  "world",  "school", "family", "garden", "market",
        "travel", "hotel",  "coffee", "orange", "stone",  "glass",  "paper",  "table",
        "phone",  "music",  "light",  "cloud",  "star",   "river",  "forest", "bridge",
        "train",  "street", "flower", "silver", "golden", "royal",  "happy",  "fresh",
        "sweet",  "quick",  "brave",  "smart",  "green",  "blue",   "white",  "summer",
        "winter", "spring", "island", "beach",  "valley", "castle", "tower",  "museum",
        "studio", "kitchen", "window", "health", "energy", "nature", "science", "space",
        "eagle",  "tiger",  "panda",  "dolphin", "pearl",  "coral",  "bread",  "cheese",
    };
    return words;
}

std::string pick_word(Rng& rng) {
    const auto& w = common_words();
    return w[rng.uniform_int(w.size())];
}

std::string random_label(Rng& rng, std::size_t len, double digit_prob) {
    static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
    static const std::string digits = "0123456789";
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
        if (rng.uniform_double() < digit_prob && i > 0)
            s += digits[rng.uniform_int(digits.size())];
        else
            s += letters[rng.uniform_int(letters.size())];
    }
    return s;
}

std::string random_letters(Rng& rng, std::size_t len) { return random_label(rng, len, 0.0); }

std::string pad_path_to(std::string url, std::size_t target, Rng& rng) {
    // Extends the path with letter segments until the URL hits `target`.
    // Segments always open with '/' so host labels stay intact.
    while (url.size() < target) {
        const std::size_t missing = target - url.size();
        if (missing == 1) {
            url += "/";
            break;
        }
        const std::size_t seg = std::min<std::size_t>(missing - 1, 4 + rng.uniform_int(8));
        url += "/";
        url += random_letters(rng, seg);
    }
    return url;
}

DatasetRow synth_benign(Rng& rng) {
    const double scheme_roll = rng.uniform_double();
    std::string url;
    if (scheme_roll < 0.60) url = "https://";
    else if (scheme_roll < 0.85) url = "http://";

    if (rng.uniform_double() < 0.55) url += "www.";
    std::string domain = pick_word(rng);
    if (rng.uniform_double() < 0.35) domain += rng.uniform_double() < 0.5 ? "-" + pick_word(rng) : pick_word(rng);
    static const std::vector<std::string> tlds = {"com", "com", "com", "org", "net",
                                                  "io",  "co.uk", "de",  "fr"};
    url += domain + "." + tlds[rng.uniform_int(tlds.size())];

    const auto target = static_cast<std::size_t>(
        std::clamp(std::llround(rng.gauss(44.28, 8.0)), 25LL, 70LL));
    if (url.size() < target) {
        std::size_t path_budget = target - url.size();
        bool want_query = rng.uniform_double() < 0.15 && path_budget > 8;
        std::size_t query_len = want_query ? 5 : 0;  // "?q=ab"
        url = pad_path_to(url, target - query_len, rng);
        if (want_query) url += "?q=" + random_letters(rng, 2);
    }
    return {url, 0, std::nullopt};
}

// Replaces path letters in-place with junk punctuation until the URL carries
// `spec_target` special characters; length and URL structure are preserved.
void inject_specials(std::string& url, int spec_target, std::size_t path_start, Rng& rng) {
    static const std::string junk = "-_%~=";
    auto is_special = [](char c) {
        const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        return c >= 33 && c <= 126 && !alnum;
    };
    int have = 0;
    for (char c : url) have += is_special(c);
    std::vector<std::size_t> spots;
    for (std::size_t i = path_start; i < url.size(); ++i) {
        const char c = url[i];
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) spots.push_back(i);
    }
    rng.shuffle(spots);
    for (std::size_t s = 0; s < spots.size() && have < spec_target; ++s, ++have)
        url[spots[s]] = junk[rng.uniform_int(junk.size())];
}

DatasetRow synth_malicious(Rng& rng) {
    std::string url;
    // Half the malicious rows arrive scheme-less, matching the mixed source
    // formats; the rest keep the path budget in check.
    const double scheme_roll = rng.uniform_double();
    if (scheme_roll < 0.30) url = "http://";
    else if (scheme_roll < 0.50) url = "https://";

    static const std::vector<std::string> sensitive = {"secure", "account", "login",  "signin",
                                                       "verify", "update",  "banking", "confirm"};
    if (rng.uniform_double() < 0.01) {
        // A small share of malicious hosts are raw IPs.
        url += std::to_string(1 + rng.uniform_int(223)) + "." + std::to_string(rng.uniform_int(256)) +
               "." + std::to_string(rng.uniform_int(256)) + "." + std::to_string(1 + rng.uniform_int(254));
    } else {
        if (rng.uniform_double() < 0.10) url += sensitive[rng.uniform_int(sensitive.size())] + ".";
        std::string domain = random_label(rng, 7 + rng.uniform_int(5), 0.28);
        if (rng.uniform_double() < 0.10) domain += "-" + random_label(rng, 3 + rng.uniform_int(3), 0.4);
        static const std::vector<std::string> tlds = {"com", "com", "net", "info", "xyz",
                                                      "top", "ru",  "biz", "online"};
        url += domain + "." + tlds[rng.uniform_int(tlds.size())];
    }
    const std::size_t path_start = url.size();

    const auto target = static_cast<std::size_t>(
        std::clamp(std::llround(rng.gauss(63.14, 12.0)), 25LL, 105LL));
    if (url.size() < target) {
        const bool want_query = rng.uniform_double() < 0.25;
        const std::size_t query_len = want_query ? 8 : 0;  // "?id=xxxx"
        const std::size_t path_target =
            target > url.size() + query_len ? target - query_len : target;
        // Sprinkle lures and hex blobs into the path.
        if (rng.uniform_double() < 0.45 && url.size() + 10 < path_target)
            url += "/" + sensitive[rng.uniform_int(sensitive.size())];
        if (rng.uniform_double() < 0.25 && url.size() + 18 < path_target) {
            url += "/";
            static const std::string hex = "0123456789abcdef";
            for (int i = 0; i < 16; ++i) url += hex[rng.uniform_int(16)];
        }
        url = pad_path_to(url, path_target, rng);
        if (want_query) url += "?id=" + random_label(rng, 4, 0.6);
    }

    const int spec_target =
        static_cast<int>(std::clamp(std::llround(rng.gauss(13.98, 3.0)), 4LL, 30LL));
    inject_specials(url, spec_target, path_start, rng);
    return {url, 1, std::nullopt};
}

}  // namespace

LabeledDataset synthesize_corpus(std::size_t n_per_class, std::uint64_t seed) {
    LabeledDataset d;
    d.name = "synthetic-" + std::to_string(n_per_class) + "x2";
    d.provenance = {"synthesize_corpus(seed=" + std::to_string(seed) + ")"};
    d.seed = seed;
    d.rows.resize(n_per_class * 2);

    // Independent streams per row keep generation order-free and
    // parallel-safe while staying byte-reproducible.
    parallel_for(n_per_class, [&](std::size_t i) {
        Rng rb(derive_seed(seed, "synth/benign", i));
        d.rows[i] = synth_benign(rb);
        Rng rm(derive_seed(seed, "synth/malicious", i));
        d.rows[n_per_class + i] = synth_malicious(rm);
    });

    Rng rng(derive_seed(seed, "synth/shuffle"));
    rng.shuffle(d.rows);
    return d;
}

}  // namespace madurl
