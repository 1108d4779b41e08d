#include <doctest.h>

#include <cmath>

#include "madurl/ensemble.hpp"
#include "test_helpers.hpp"

using namespace madurl;

namespace {

// 1-D threshold problem: x < 0 -> class 0, x >= 0 -> class 1.
Matrix one_d(const std::vector<double>& xs) {
    Matrix m(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) m(i, 0) = xs[i];
    return m;
}

// Separable synthetic data: two shifted Gaussian clouds in `dims` dimensions.
struct Cloud {
    Matrix x;
    std::vector<int> y;
};
Cloud two_clouds(std::size_t n_per_class, std::size_t dims, double gap, std::uint64_t seed) {
    Cloud c;
    c.x = Matrix(2 * n_per_class, dims);
    Rng rng(seed);
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const int label = i < n_per_class ? 0 : 1;
        c.y.push_back(label);
        for (std::size_t j = 0; j < dims; ++j)
            c.x(i, j) = rng.gauss(label == 0 ? -gap / 2 : gap / 2, 1.0);
    }
    return c;
}

double holdout_accuracy(const EnsembleModel& m, const Cloud& test) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.x.n_rows; ++i)
        if (m.predict(test.x.row(i)) == test.y[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.x.n_rows);
}

LabeledDataset cloud_dataset(const Cloud& c) {
    LabeledDataset d;
    d.name = "cloud";
    for (std::size_t i = 0; i < c.x.n_rows; ++i) {
        auto row = c.x.row(i);
        DatasetRow r;
        r.url = "u" + std::to_string(i);
        r.label = c.y[i];
        r.features = FeatureVector{std::vector<double>(row.begin(), row.end())};
        d.rows.push_back(std::move(r));
    }
    return d;
}

}  // namespace

TEST_CASE("train_cart separates 1-D threshold data with one split") {
    const Matrix x = one_d({-3, -2, -1, -0.5, 0.5, 1, 2, 3});
    const std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
    const std::vector<double> w(x.n_rows, 1.0);
    std::vector<std::size_t> rows(x.n_rows);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;

    const DecisionTree t = train_cart(x, y, w, rows, CartParams{5, 1, -1});
    CHECK(t.max_depth == 1);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
        const auto& scores = t.predict_leaf(x.row(i));
        CHECK((scores[1] > scores[0] ? 1 : 0) == y[i]);
    }
}

TEST_CASE("train_cart degenerate inputs give single leaves") {
    SUBCASE("uniform labels") {
        const Matrix x = one_d({1, 2, 3});
        const DecisionTree t =
            train_cart(x, {1, 1, 1}, {1, 1, 1}, {0, 1, 2}, CartParams{5, 1, -1});
        CHECK(t.nodes.size() == 1);
        CHECK(t.nodes[0].values[1] == 1.0);
    }
    SUBCASE("identical rows") {
        Matrix x(4, 2);
        for (std::size_t i = 0; i < 4; ++i) {
            x(i, 0) = 5;
            x(i, 1) = 7;
        }
        const DecisionTree t =
            train_cart(x, {0, 1, 0, 1}, {1, 1, 1, 1}, {0, 1, 2, 3}, CartParams{5, 1, -1});
        CHECK(t.nodes.size() == 1);
    }
}

TEST_CASE("weighted gini: a dominant row controls the split") {
    // Oracle, by hand: rows at x = {0, 1, 2, 3}, labels {0, 0, 1, 0}, with
    // 99% of the weight on the third row. Unweighted, the majority is class
    // 0 everywhere; weighted, the tree must carve out x=2 as class 1.
    const Matrix x = one_d({0, 1, 2, 3});
    const std::vector<int> y = {0, 0, 1, 0};
    const std::vector<double> w = {0.004, 0.003, 0.99, 0.003};
    const DecisionTree t = train_cart(x, y, w, {0, 1, 2, 3}, CartParams{5, 1, -1});
    const auto& scores = t.predict_leaf(x.row(2));
    CHECK(scores[1] > scores[0]);
}

TEST_CASE("random forest") {
    const Cloud train = two_clouds(300, 5, 4.0, 101);
    const Cloud test = two_clouds(150, 5, 4.0, 202);

    TrainOptions opts;
    opts.n_estimators = 100;
    opts.max_depth = 10;
    opts.seed = 7;

    SUBCASE("high accuracy on separable clouds") {
        const EnsembleModel m = train_random_forest(train.x, train.y, opts);
        CHECK(holdout_accuracy(m, test) >= 0.95);
    }
    SUBCASE("one estimator degenerates to a bootstrap tree") {
        TrainOptions one = opts;
        one.n_estimators = 1;
        const EnsembleModel m = train_random_forest(train.x, train.y, one);
        CHECK(m.n_estimators() == 1);
    }
    SUBCASE("same seed, identical serialization") {
        TrainOptions small = opts;
        small.n_estimators = 10;
        const auto a = train_random_forest(train.x, train.y, small).to_json().dump();
        const auto b = train_random_forest(train.x, train.y, small).to_json().dump();
        CHECK(a == b);
    }
    SUBCASE("single class refuses to train") {
        const std::vector<int> ones(train.x.n_rows, 1);
        CHECK_THROWS_AS(train_random_forest(train.x, ones, opts), SingleClass);
    }
}

TEST_CASE("adaboost reweighting follows the (1-err)/err rule") {
    // Oracle, by hand: labels {0,1,0,1} at x = {1,2,3,4}. Every depth-1
    // stump misclassifies at least one row; the Gini tie-break lands on
    // x <= 1.5, whose weighted error under uniform weights is exactly 0.25.
    // The round-1 tree weight must therefore be ln((1-0.25)/0.25) = ln 3,
    // and misclassified rows get promoted by a factor of 3.
    const Matrix x = one_d({1, 2, 3, 4});
    const std::vector<int> y = {0, 1, 0, 1};

    TrainOptions opts;
    opts.n_estimators = 3;
    opts.base_depth = 1;
    const EnsembleModel m = train_adaboost(x, y, opts);
    REQUIRE(m.n_estimators() >= 1);
    CHECK(m.tree_weights[0] == doctest::Approx(std::log(3.0)));
    CHECK(std::exp(m.tree_weights[0]) == doctest::Approx(3.0));
}

TEST_CASE("adaboost on a noisy majority problem boosts multiple rounds") {
    // x in {0..9}; class 1 iff x in {2, 7}: stumps need several rounds.
    Matrix x = one_d({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const std::vector<int> y = {0, 0, 1, 0, 0, 0, 0, 1, 0, 0};
    TrainOptions opts;
    opts.n_estimators = 30;
    opts.base_depth = 1;
    const EnsembleModel m = train_adaboost(x, y, opts);
    CHECK(m.n_estimators() > 1);

    SUBCASE("round weights stay a probability distribution") {
        // Indirect check through training success: replicate the loop and
        // assert the invariant directly.
        std::vector<double> w(x.n_rows, 1.0 / static_cast<double>(x.n_rows));
        std::vector<std::size_t> rows(x.n_rows);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        for (int round = 0; round < 5; ++round) {
            const DecisionTree t = train_cart(x, y, w, rows, CartParams{1, 1, -1});
            double err = 0.0;
            std::vector<char> wrong(x.n_rows, 0);
            for (std::size_t i = 0; i < x.n_rows; ++i) {
                const auto& s = t.predict_leaf(x.row(i));
                if ((s[1] > s[0] ? 1 : 0) != y[i]) {
                    wrong[i] = 1;
                    err += w[i];
                }
            }
            if (err <= 0.0 || err >= 0.5) break;
            const double factor = (1.0 - err) / err;
            double sum = 0.0;
            for (std::size_t i = 0; i < x.n_rows; ++i) {
                if (wrong[i]) w[i] *= factor;
                sum += w[i];
            }
            for (auto& wi : w) wi /= sum;
            double check_sum = 0.0;
            for (double wi : w) {
                CHECK(wi >= 0.0);
                check_sum += wi;
            }
            CHECK(check_sum == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("adaboost early-stops on a perfect base learner") {
    const Matrix x = one_d({-2, -1, 1, 2});
    const std::vector<int> y = {0, 0, 1, 1};
    TrainOptions opts;
    opts.n_estimators = 50;
    opts.base_depth = 2;
    const EnsembleModel m = train_adaboost(x, y, opts);
    CHECK(m.n_estimators() == 1);
}

TEST_CASE("adaboost separable accuracy") {
    const Cloud train = two_clouds(300, 5, 4.0, 303);
    const Cloud test = two_clouds(150, 5, 4.0, 404);
    TrainOptions opts;
    opts.n_estimators = 50;
    opts.base_depth = 2;
    const EnsembleModel m = train_adaboost(train.x, train.y, opts);
    CHECK(holdout_accuracy(m, test) >= 0.95);
}

TEST_CASE("gradient boost") {
    const Cloud train = two_clouds(300, 5, 4.0, 505);
    const Cloud test = two_clouds(150, 5, 4.0, 606);
    TrainOptions opts;
    opts.n_estimators = 60;
    opts.boost_depth = 3;
    opts.learning_rate = 0.1;

    SUBCASE("initial prediction is the prior log-odds (zero when balanced)") {
        const EnsembleModel m = train_gradient_boost(train.x, train.y, opts);
        CHECK(m.base_score == doctest::Approx(0.0).epsilon(1e-12));

        std::vector<int> skewed = train.y;
        for (std::size_t i = 0; i < 100; ++i) skewed[i] = 1;  // 700/500 now
        const EnsembleModel ms = train_gradient_boost(train.x, skewed, opts);
        double p1 = 0;
        for (int v : skewed) p1 += v;
        p1 /= static_cast<double>(skewed.size());
        CHECK(ms.base_score == doctest::Approx(std::log(p1 / (1 - p1))));
    }
    SUBCASE("training loss is non-increasing per round") {
        const EnsembleModel m = train_gradient_boost(train.x, train.y, opts);
        REQUIRE(m.training_loss.size() == static_cast<std::size_t>(opts.n_estimators) + 1);
        for (std::size_t r = 1; r < m.training_loss.size(); ++r)
            CHECK(m.training_loss[r] <= m.training_loss[r - 1] + 1e-12);
    }
    SUBCASE("separable accuracy") {
        const EnsembleModel m = train_gradient_boost(train.x, train.y, opts);
        CHECK(holdout_accuracy(m, test) >= 0.95);
    }
}

TEST_CASE("regularized boosting") {
    const Cloud train = two_clouds(300, 5, 4.0, 707);
    const Cloud test = two_clouds(150, 5, 4.0, 808);
    TrainOptions opts;
    opts.n_estimators = 60;
    opts.boost_depth = 3;
    opts.learning_rate = 0.1;
    opts.lambda = 1.0;
    opts.gamma = 0.0;

    SUBCASE("separable accuracy") {
        const EnsembleModel m = train_regularized_boost(train.x, train.y, opts);
        CHECK(holdout_accuracy(m, test) >= 0.95);
    }
    SUBCASE("lambda to infinity drives leaf weights to zero") {
        CHECK(regularized_leaf_weight(5.0, 2.0, 1e12) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(std::abs(regularized_leaf_weight(5.0, 2.0, 1e6)) <
              std::abs(regularized_leaf_weight(5.0, 2.0, 1.0)));
    }
    SUBCASE("lambda=0, squared error: leaf weight equals the mean residual") {
        // Algebraic oracle on a 4-point dataset with a depth-1 tree: under
        // squared error, hessians are 1 and -G/(H+0) is the mean residual —
        // exactly the plain gradient-boost leaf value.
        const Matrix x = one_d({0, 1, 10, 11});
        const std::vector<double> residuals = {0.5, 0.7, -0.2, -0.4};
        std::vector<double> g(4), h(4, 1.0);
        for (int i = 0; i < 4; ++i) g[i] = -residuals[i];
        const DecisionTree t =
            train_grad_tree(x, g, h, g, h, {0, 1, 2, 3}, GradTreeParams{1, 1, 0.0, 0.0});
        REQUIRE(t.nodes.size() == 3);  // root + 2 leaves
        const double left = t.predict_leaf(x.row(0))[0];
        const double right = t.predict_leaf(x.row(2))[0];
        CHECK(left == doctest::Approx((0.5 + 0.7) / 2.0));
        CHECK(right == doctest::Approx((-0.2 - 0.4) / 2.0));
    }
}

TEST_CASE("predict_proba contract") {
    const Cloud train = two_clouds(100, 4, 3.0, 909);
    TrainOptions opts;
    opts.n_estimators = 20;
    opts.seed = 3;

    for (const auto kind : all_ensemble_kinds()) {
        CAPTURE(to_string(kind));
        const EnsembleModel m = train_ensemble(kind, train.x, train.y, opts);
        Rng rng(55);
        for (int t = 0; t < 1000; ++t) {
            std::vector<double> v(4);
            for (auto& vi : v) vi = rng.gauss(0, 3);
            const auto p = m.predict_proba(v);
            CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(p[0] >= kProbClamp);
            CHECK(p[1] >= kProbClamp);
            CHECK(p[0] <= 1.0 - kProbClamp);
            CHECK(p[1] <= 1.0 - kProbClamp);
            CHECK(m.predict(v) == (p[1] > p[0] ? 1 : 0));
        }
    }
}

TEST_CASE("probability clamp holds under unanimous votes") {
    // A forest whose every tree is a pure class-1 leaf.
    EnsembleModel m;
    m.kind = EnsembleKind::RandomForest;
    m.n_features = 1;
    for (int t = 0; t < 10; ++t) {
        DecisionTree tree;
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, {0.0, 1.0}});
        m.trees.push_back(std::move(tree));
        m.tree_weights.push_back(1.0);
    }
    const std::vector<double> v = {0.0};
    const auto p = m.predict_proba(v);
    CHECK(p[1] == 1.0 - kProbClamp);
    CHECK(p[0] == doctest::Approx(kProbClamp).epsilon(1e-9));
}

TEST_CASE("training is invariant to row order given a fixed seed") {
    const Cloud c = two_clouds(100, 3, 3.0, 111);
    TrainOptions opts;
    opts.n_estimators = 15;
    opts.seed = 99;

    // Reversed copy of the same rows.
    Cloud rev = c;
    for (std::size_t i = 0; i < c.x.n_rows; ++i) {
        const std::size_t j = c.x.n_rows - 1 - i;
        for (std::size_t col = 0; col < c.x.n_cols; ++col) rev.x(i, col) = c.x(j, col);
        rev.y[i] = c.y[j];
    }

    for (const auto kind : {EnsembleKind::GradientBoost, EnsembleKind::RegularizedBoost}) {
        const EnsembleModel a = train_ensemble(kind, c.x, c.y, opts);
        const EnsembleModel b = train_ensemble(kind, rev.x, rev.y, opts);
        Rng rng(22);
        for (int t = 0; t < 200; ++t) {
            std::vector<double> v(3);
            for (auto& vi : v) vi = rng.gauss(0, 2);
            CHECK(a.predict_proba(v)[1] == doctest::Approx(b.predict_proba(v)[1]).epsilon(1e-12));
        }
    }
}

TEST_CASE("serialization round-trip preserves predictions exactly") {
    const Cloud train = two_clouds(200, 6, 3.5, 121);
    const std::string dir = testutil::temp_dir("model_io");
    TrainOptions opts;
    opts.n_estimators = 25;
    opts.seed = 5;

    for (const auto kind : all_ensemble_kinds()) {
        CAPTURE(to_string(kind));
        const EnsembleModel m = train_ensemble(kind, train.x, train.y, opts);
        const std::string path = dir + "/" + to_string(kind) + ".json";
        m.save(path);
        const EnsembleModel loaded = EnsembleModel::load(path);

        Rng rng(1234);
        for (int t = 0; t < 1000; ++t) {
            std::vector<double> v(6);
            for (auto& vi : v) vi = rng.gauss(0, 4);
            const auto pa = m.predict_proba(v);
            const auto pb = loaded.predict_proba(v);
            CHECK(pa[0] == pb[0]);  // bit-exact
            CHECK(pa[1] == pb[1]);
        }
    }
}

TEST_CASE("grid search sweeps the published n_estimators grid") {
    const Cloud c = two_clouds(60, 3, 3.0, 131);
    const LabeledDataset d = cloud_dataset(c);
    const std::vector<int> grid = {1, 100, 200, 500, 1000, 1500};

    TrainOptions base;
    base.max_depth = 4;
    base.seed = 17;
    const GridSearchResult res = grid_search(d, EnsembleKind::RandomForest, grid, 5, base, 77);

    CHECK(res.table.size() == 6);
    double best = -1;
    for (const auto& row : res.table) best = std::max(best, row.mean_accuracy);
    CHECK(res.best_accuracy == best);

    SUBCASE("tie-break picks the smaller tree count") {
        // With a fully separable problem most grid points tie at 1.0.
        int first_best = 0;
        for (const auto& row : res.table)
            if (row.mean_accuracy == best) {
                first_best = row.n_estimators;
                break;
            }
        CHECK(res.best_n_estimators == first_best);
    }
    SUBCASE("more trees never hurt on the separable corpus (soft check)") {
        CHECK(res.table.back().mean_accuracy >= res.table.front().mean_accuracy - 0.02);
    }
}
