#include <doctest.h>

#include <fstream>

#include "madurl/dataset.hpp"
#include "test_helpers.hpp"

using namespace madurl;

namespace {

std::string write_temp_csv(const std::string& tag, const std::string& body) {
    const std::string path = testutil::temp_dir("csv_" + tag) + "/input.csv";
    std::ofstream out(path);
    out << body;
    return path;
}

LabeledDataset with_features(std::vector<std::vector<double>> rows, std::vector<int> labels) {
    LabeledDataset d;
    d.name = "inline";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        DatasetRow r;
        r.url = "u" + std::to_string(i);
        r.label = labels[i];
        r.features = FeatureVector{std::move(rows[i])};
        d.rows.push_back(std::move(r));
    }
    return d;
}

}  // namespace

TEST_CASE("ingest_csv loads valid rows and skips malformed ones") {
    SUBCASE("three valid rows") {
        const auto path = write_temp_csv("ok", "url,label\na.com,0\nb.com,1\nc.com,0\n");
        const auto d = ingest_csv(path);
        CHECK(d.rows.size() == 3);
        CHECK(d.skipped == 0);
    }
    SUBCASE("unparsable row is skipped, not fatal") {
        const auto path = write_temp_csv("skip", "url,label\na.com,0\n,1\nc.com,0\n");
        const auto d = ingest_csv(path);
        CHECK(d.rows.size() == 2);
        CHECK(d.skipped == 1);
    }
    SUBCASE("label outside {0,1} is malformed") {
        const auto path = write_temp_csv("label2", "url,label\na.com,0\nb.com,2\n");
        const auto d = ingest_csv(path);
        CHECK(d.rows.size() == 1);
        CHECK(d.skipped == 1);
    }
    SUBCASE("missing column") {
        const auto path = write_temp_csv("nocol", "url,target\na.com,0\n");
        CHECK_THROWS_AS(ingest_csv(path), MissingColumn);
    }
    SUBCASE("empty file") {
        const auto path = write_temp_csv("empty", "");
        CHECK_THROWS_AS(ingest_csv(path), EmptyFile);
    }
    SUBCASE("quoted urls with commas survive") {
        const auto path = write_temp_csv("quoted", "url,label\n\"a.com/x,y\",1\n");
        const auto d = ingest_csv(path);
        REQUIRE(d.rows.size() == 1);
        CHECK(d.rows[0].url == "a.com/x,y");
    }
}

TEST_CASE("preprocess dedups hostnames and shuffles deterministically") {
    LabeledDataset d;
    d.rows = {{"http://a.com/1", 0, {}}, {"http://a.com/2", 1, {}}, {"http://b.com/1", 0, {}},
              {"http://c.com", 1, {}},  {"", 0, {}}};

    SUBCASE("duplicate host keeps the first row") {
        const auto p = preprocess(d, 1);
        CHECK(p.rows.size() == 3);
        bool found = false;
        for (const auto& r : p.rows)
            if (r.url == "http://a.com/1") found = true;
        CHECK(found);
        CHECK(p.skipped == 1);  // the empty row
    }
    SUBCASE("same seed, same order") {
        const auto p1 = preprocess(d, 7);
        const auto p2 = preprocess(d, 7);
        REQUIRE(p1.rows.size() == p2.rows.size());
        for (std::size_t i = 0; i < p1.rows.size(); ++i) CHECK(p1.rows[i].url == p2.rows[i].url);
    }
    SUBCASE("different seeds permute with overwhelming probability") {
        LabeledDataset big;
        for (int i = 0; i < 50; ++i)
            big.rows.push_back({"http://h" + std::to_string(i) + ".com", i % 2, {}});
        const auto p1 = preprocess(big, 1);
        const auto p2 = preprocess(big, 2);
        bool any_diff = false;
        for (std::size_t i = 0; i < p1.rows.size(); ++i)
            if (p1.rows[i].url != p2.rows[i].url) any_diff = true;
        CHECK(any_diff);
    }
}

TEST_CASE("merge_balanced applies the half-of-benign cap") {
    auto make = [](std::size_t n, int label, const std::string& prefix) {
        LabeledDataset d;
        d.name = prefix;
        for (std::size_t i = 0; i < n; ++i)
            d.rows.push_back({prefix + std::to_string(i) + ".com", label, {}});
        return d;
    };

    SUBCASE("minority class caps") {
        const auto m = merge_balanced(make(1000, 0, "b"), make(400, 1, "m"), 3);
        CHECK(m.count_label(0) == 400);
        CHECK(m.count_label(1) == 400);
    }
    SUBCASE("half of benign caps") {
        const auto m = merge_balanced(make(1000, 0, "b"), make(800, 1, "m"), 3);
        CHECK(m.count_label(0) == 500);
        CHECK(m.count_label(1) == 500);
    }
    SUBCASE("class counts always equal") {
        Rng rng(5);
        for (int t = 0; t < 20; ++t) {
            const std::size_t nb = 2 + rng.uniform_int(50), nm = 1 + rng.uniform_int(50);
            const auto m = merge_balanced(make(nb, 0, "b"), make(nm, 1, "m"), t);
            CHECK(m.count_label(0) == m.count_label(1));
        }
    }
    SUBCASE("empty class throws") {
        CHECK_THROWS_AS(merge_balanced(make(1, 0, "b"), make(5, 1, "m"), 0), InsufficientRows);
    }
}

TEST_CASE("scaler follows the interquartile rule") {
    SUBCASE("median 3, IQR 2 on 1..5") {
        auto d = with_features({{1}, {2}, {3}, {4}, {5}}, {0, 0, 1, 1, 0});
        const auto s = ScalerState::fit(d);
        CHECK(s.medians()[0] == 3.0);
        CHECK(s.iqrs()[0] == 2.0);
        CHECK(s.apply(FeatureVector{{3.0}}).values[0] == 0.0);
        CHECK(s.apply(FeatureVector{{5.0}}).values[0] == 1.0);
    }
    SUBCASE("quantile oracle: linear interpolation between order statistics") {
        CHECK(quantile_linear({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
        CHECK(quantile_linear({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
        CHECK(quantile_linear({10}, 0.75) == 10.0);
    }
    SUBCASE("constant slot passes through") {
        auto d = with_features({{7, 1}, {7, 2}, {7, 3}}, {0, 1, 0});
        const auto s = ScalerState::fit(d);
        CHECK(s.apply(FeatureVector{{7, 2}}).values[0] == 7.0);
    }
    SUBCASE("apply is idempotent across calls") {
        auto d = with_features({{1, -3}, {4, 9}, {2, 0}}, {0, 1, 0});
        const auto s = ScalerState::fit(d);
        const auto once = s.apply(*d.rows[1].features);
        const auto again = s.apply(*d.rows[1].features);
        CHECK(once.values == again.values);
    }
    SUBCASE("sentinels are excluded from the fit but scaled on apply") {
        auto d = with_features({{-1}, {-1}, {2}, {4}, {6}}, {0, 0, 1, 1, 0});
        const auto s = ScalerState::fit(d);
        CHECK(s.medians()[0] == 4.0);  // fitted on {2,4,6} only
        CHECK(s.iqrs()[0] == 2.0);
        CHECK(s.apply(FeatureVector{{-1.0}}).values[0] == doctest::Approx(-2.5));
    }
    SUBCASE("scaling preserves per-slot order when IQR > 0") {
        auto d = with_features({{1, 5}, {3, 1}, {9, 2}, {4, 8}}, {0, 1, 0, 1});
        const auto s = ScalerState::fit(d);
        for (std::size_t a = 0; a < d.rows.size(); ++a)
            for (std::size_t b = 0; b < d.rows.size(); ++b) {
                const auto va = s.apply(*d.rows[a].features).values;
                const auto vb = s.apply(*d.rows[b].features).values;
                for (std::size_t j = 0; j < va.size(); ++j) {
                    if (d.rows[a].features->values[j] < d.rows[b].features->values[j])
                        CHECK(va[j] < vb[j]);
                }
            }
    }
    SUBCASE("too few rows") {
        auto d = with_features({{1}}, {0});
        CHECK_THROWS_AS(ScalerState::fit(d), NoFeatures);
    }
}

TEST_CASE("stratified split holds class ratios within one row") {
    LabeledDataset d;
    for (int i = 0; i < 1000; ++i)
        d.rows.push_back({"u" + std::to_string(i), i < 500 ? 0 : 1, {}});

    const auto [train, test] = split(d, 0.7, 11);
    CHECK(train.rows.size() == 700);
    CHECK(test.rows.size() == 300);
    CHECK(train.count_label(0) == 350);
    CHECK(train.count_label(1) == 350);

    SUBCASE("same seed reproduces the split") {
        const auto [t1, e1] = split(d, 0.7, 42);
        const auto [t2, e2] = split(d, 0.7, 42);
        REQUIRE(t1.rows.size() == t2.rows.size());
        for (std::size_t i = 0; i < t1.rows.size(); ++i) CHECK(t1.rows[i].url == t2.rows[i].url);
    }
}

TEST_CASE("kfold partitions every row exactly once with balanced folds") {
    LabeledDataset d;
    for (int i = 0; i < 103; ++i)
        d.rows.push_back({"u" + std::to_string(i), i % 3 == 0 ? 1 : 0, {}});

    for (int k : {5, 10}) {
        const auto folds = kfold(d, k, 9);
        REQUIRE(static_cast<int>(folds.size()) == k);
        std::vector<int> seen(d.rows.size(), 0);
        std::size_t lo = d.rows.size(), hi = 0;
        for (const auto& f : folds) {
            lo = std::min(lo, f.size());
            hi = std::max(hi, f.size());
            for (std::size_t i : f) seen[i] += 1;
        }
        for (int c : seen) CHECK(c == 1);
        CHECK(hi - lo <= 1);
    }
    SUBCASE("identical folds for identical seeds") {
        const auto f1 = kfold(d, 5, 31);
        const auto f2 = kfold(d, 5, 31);
        CHECK(f1 == f2);
    }
}

TEST_CASE("synthesize_corpus is deterministic and balanced") {
    const auto d1 = synthesize_corpus(500, 77);
    const auto d2 = synthesize_corpus(500, 77);
    REQUIRE(d1.rows.size() == 1000);
    CHECK(d1.count_label(0) == 500);
    CHECK(d1.count_label(1) == 500);
    for (std::size_t i = 0; i < d1.rows.size(); ++i) {
        CHECK(d1.rows[i].url == d2.rows[i].url);
        CHECK(d1.rows[i].label == d2.rows[i].label);
    }
}

TEST_CASE("profile hits the published corpus statistics") {
    const auto d = synthesize_corpus(5000, 20220101);
    const auto rep = profile(d);

    CHECK(rep.benign.mean_url_length == doctest::Approx(44.28).epsilon(0.05));
    CHECK(std::abs(rep.benign.mean_url_length - 44.28) <= 2.0);
    CHECK(std::abs(rep.malicious.mean_url_length - 63.14) <= 2.0);
    CHECK(std::abs(rep.malicious.mean_special_chars - 13.98) <= 1.0);
    CHECK(std::abs(rep.malicious.mean_path_length - 42.60) <= 2.0);
    CHECK(rep.malicious.ip_host_fraction <= 0.02);

    SUBCASE("histogram covers every row") {
        double total = 0;
        for (const auto& b : rep.benign.histogram) total += b[2];
        CHECK(total == doctest::Approx(static_cast<double>(rep.benign.count)));
    }
    SUBCASE("empty-path corpus profiles path length zero") {
        LabeledDataset flat;
        flat.rows = {{"a.com", 0, {}}, {"b.com", 0, {}}};
        CHECK(profile(flat).benign.mean_path_length == 0.0);
    }
}

TEST_CASE("features csv round-trips vectors exactly") {
    const std::string dir = testutil::temp_dir("featcsv");
    LabeledDataset d;
    d.name = "rt";
    Rng rng(404);
    for (int i = 0; i < 25; ++i) {
        std::vector<double> v(kFeatureSlots);
        for (auto& vi : v) vi = rng.gauss(0, 7) * (rng.uniform_double() < 0.1 ? 1e-9 : 1.0);
        d.rows.push_back({"u" + std::to_string(i) + ".com", i % 2, FeatureVector{std::move(v)}});
    }
    write_features_csv(d, dir + "/f.csv");
    const LabeledDataset back = read_features_csv(dir + "/f.csv");
    REQUIRE(back.rows.size() == d.rows.size());
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        CHECK(back.rows[i].url == d.rows[i].url);
        CHECK(back.rows[i].label == d.rows[i].label);
        CHECK(back.rows[i].features->values == d.rows[i].features->values);
    }
}
