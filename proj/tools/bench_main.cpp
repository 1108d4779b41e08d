// Serial vs OpenMP comparison for the data-parallel kernels. Each section
// runs the same kernel with threading off and on, checks the outputs are
// identical, and reports wall times.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "madurl/dataset.hpp"
#include "madurl/ensemble.hpp"
#include "madurl/extractor.hpp"
#include "madurl/kmeans.hpp"
#include "madurl/parallel.hpp"
#include "madurl/zoo.hpp"

#ifndef MADURL_DATA_DIR
#define MADURL_DATA_DIR "data"
#endif

using namespace madurl;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
std::pair<double, double> run_both(F&& kernel) {
    threading::Scope serial(false);
    auto t0 = std::chrono::steady_clock::now();
    kernel();
    const double t_serial = ms_since(t0);

    threading::set_enabled(true);
    t0 = std::chrono::steady_clock::now();
    kernel();
    const double t_parallel = ms_since(t0);
    threading::set_enabled(false);
    return {t_serial, t_parallel};
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s serial %9.1f ms   openmp %9.1f ms   speedup %5.2fx   identical %s\n",
                name.c_str(), serial_ms, parallel_ms,
                parallel_ms > 0 ? serial_ms / parallel_ms : 0.0, identical ? "yes" : "NO");
}

Matrix blob_matrix(std::size_t n, std::size_t dims, std::uint64_t seed) {
    Matrix x(n, dims);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dims; ++j)
            x(i, j) = rng.gauss(i < n / 2 ? -2.0 : 2.0, 1.0);
    return x;
}

}  // namespace

int main() {
    std::printf("madurl kernel benchmark (%d thread(s) available)\n\n", threading::max_threads());

    // Feature extraction over a synthetic corpus.
    {
        const std::string data_dir = MADURL_DATA_DIR;
        const ExtractorResources res = ExtractorResources::load(
            {data_dir + "/tld_snapshot.txt", data_dir + "/word_pos.tsv",
             data_dir + "/sensitive_words.txt", data_dir + "/suspicious_domains.txt",
             data_dir + "/homoglyphs.txt"});
        const LabeledDataset corpus = synthesize_corpus(3000, 7);
        const FeatureExtractor fx = FeatureExtractor::fit(corpus, res);
        const ProviderSuite live = make_provider_suite(ProviderMode::Live, "");

        LabeledDataset out_serial, out_parallel;
        {
            threading::Scope s(false);
            auto t0 = std::chrono::steady_clock::now();
            out_serial = fx.extract_all(corpus, live, 19000);
            const double ts = ms_since(t0);
            threading::set_enabled(true);
            t0 = std::chrono::steady_clock::now();
            out_parallel = fx.extract_all(corpus, live, 19000);
            const double tp = ms_since(t0);
            bool same = out_serial.rows.size() == out_parallel.rows.size();
            for (std::size_t i = 0; same && i < out_serial.rows.size(); ++i)
                same = out_serial.rows[i].features->values == out_parallel.rows[i].features->values;
            report("feature extraction (6k)", ts, tp, same);
        }
    }

    // K-means assignment kernel.
    {
        const Matrix x = blob_matrix(200000, 16, 11);
        std::vector<std::vector<double>> centroids;
        Rng rng(3);
        for (int c = 0; c < 8; ++c) {
            std::vector<double> v(16);
            for (auto& vi : v) vi = rng.gauss(0, 2);
            centroids.push_back(std::move(v));
        }
        std::vector<int> a_serial, a_parallel;
        auto t0 = std::chrono::steady_clock::now();
        assign_nearest_serial(x, centroids, a_serial);
        const double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        assign_nearest(x, centroids, a_parallel);
        const double tp = ms_since(t0);
        report("kmeans assignment (200k)", ts, tp, a_serial == a_parallel);
    }

    // Random forest training (tree-level parallelism).
    {
        const Matrix x = blob_matrix(4000, 20, 23);
        std::vector<int> y(x.n_rows);
        for (std::size_t i = 0; i < x.n_rows; ++i) y[i] = i < x.n_rows / 2 ? 0 : 1;
        TrainOptions opts;
        opts.n_estimators = 60;
        opts.max_depth = 8;
        opts.seed = 5;

        std::string json_serial, json_parallel;
        const auto [ts, tp] = run_both([&] {
            const EnsembleModel m = train_random_forest(x, y, opts);
            if (threading::enabled()) json_parallel = m.to_json().dump();
            else json_serial = m.to_json().dump();
        });
        report("random forest (60 trees)", ts, tp, json_serial == json_parallel);
    }

    // Batch prediction.
    {
        const Matrix x = blob_matrix(2000, 12, 31);
        std::vector<int> y(x.n_rows);
        for (std::size_t i = 0; i < x.n_rows; ++i) y[i] = i < x.n_rows / 2 ? 0 : 1;
        TrainOptions opts;
        opts.n_estimators = 200;
        opts.max_depth = 8;
        opts.seed = 9;
        const EnsembleModel m = train_random_forest(x, y, opts);
        const Matrix probe = blob_matrix(100000, 12, 37);

        std::vector<std::array<double, 2>> p_serial, p_parallel;
        auto t0 = std::chrono::steady_clock::now();
        {
            threading::Scope s(false);
            p_serial = predict_proba_batch(m, probe);
        }
        const double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        p_parallel = predict_proba_batch(m, probe);
        const double tp = ms_since(t0);
        report("batch predict (100k)", ts, tp, p_serial == p_parallel);
    }

    // Per-sample ZOO attacks.
    {
        const Matrix x = blob_matrix(600, 10, 41);
        std::vector<int> y(x.n_rows);
        for (std::size_t i = 0; i < x.n_rows; ++i) y[i] = i < x.n_rows / 2 ? 0 : 1;
        TrainOptions opts;
        opts.n_estimators = 50;
        opts.boost_depth = 3;
        opts.seed = 13;
        const EnsembleModel m = train_regularized_boost(x, y, opts);

        LabeledDataset test;
        for (std::size_t i = 0; i < 200; ++i) {
            auto row = x.row(i * 3 % x.n_rows);
            test.rows.push_back({"r" + std::to_string(i), y[i * 3 % x.n_rows],
                                 FeatureVector{std::vector<double>(row.begin(), row.end())}});
        }
        AttackConfig cfg;
        cfg.budget = 300;
        cfg.probe_k = 0.5;
        cfg.step_h = 0.05;
        cfg.seed = 90;

        AttackEvalResult r_serial, r_parallel;
        auto t0 = std::chrono::steady_clock::now();
        {
            threading::Scope s(false);
            r_serial = attack_accuracy_rate(m, test, cfg);
        }
        const double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        r_parallel = attack_accuracy_rate(m, test, cfg);
        const double tp = ms_since(t0);
        const bool same = r_serial.robust_accuracy_pct == r_parallel.robust_accuracy_pct &&
                          r_serial.total_queries == r_parallel.total_queries;
        report("zoo attack (200 samples)", ts, tp, same);
    }

    return 0;
}
