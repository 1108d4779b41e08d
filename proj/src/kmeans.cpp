#include "madurl/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "madurl/parallel.hpp"

namespace madurl {

namespace {

double sq_dist(std::span<const double> a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

int nearest_centroid(std::span<const double> row, const std::vector<std::vector<double>>& centroids) {
    int bestc = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = sq_dist(row, centroids[c]);
        if (d < best) {
            best = d;
            bestc = static_cast<int>(c);
        }
    }
    return bestc;
}

}  // namespace

void assign_nearest_serial(const Matrix& x, const std::vector<std::vector<double>>& centroids,
                           std::vector<int>& assignments) {
    assignments.resize(x.n_rows);
    for (std::size_t i = 0; i < x.n_rows; ++i)
        assignments[i] = nearest_centroid(x.row(i), centroids);
}

void assign_nearest(const Matrix& x, const std::vector<std::vector<double>>& centroids,
                    std::vector<int>& assignments) {
    assignments.resize(x.n_rows);
    parallel_for(x.n_rows, [&](std::size_t i) {
        assignments[i] = nearest_centroid(x.row(i), centroids);
    });
}

namespace {

double total_distortion(const Matrix& x, const std::vector<std::vector<double>>& centroids,
                        const std::vector<int>& assignments) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.n_rows; ++i)
        s += sq_dist(x.row(i), centroids[static_cast<std::size_t>(assignments[i])]);
    return s;
}

std::vector<std::vector<double>> kmeanspp_seed(const Matrix& x, int k, Rng& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    auto row_vec = [&](std::size_t i) {
        auto r = x.row(i);
        return std::vector<double>(r.begin(), r.end());
    };
    centroids.push_back(row_vec(rng.uniform_int(x.n_rows)));
    std::vector<double> d2(x.n_rows);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < x.n_rows; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sq_dist(x.row(i), c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.uniform_int(x.n_rows);
        } else {
            const double target = rng.uniform_double() * total;
            double acc = 0.0;
            pick = x.n_rows - 1;
            for (std::size_t i = 0; i < x.n_rows; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(row_vec(pick));
    }
    return centroids;
}

KMeansResult lloyd(const Matrix& x, std::vector<std::vector<double>> centroids, int max_iter,
                   std::uint64_t seed) {
    const int k = static_cast<int>(centroids.size());
    KMeansResult res;
    res.k = k;
    res.seed = seed;
    std::vector<int> assignments(x.n_rows, -1), prev;

    for (int iter = 0; iter < max_iter; ++iter) {
        prev = assignments;
        assign_nearest(x, centroids, assignments);
        res.iterations = iter + 1;
        res.distortion_trace.push_back(total_distortion(x, centroids, assignments));
        if (assignments == prev) break;

        // Mean update; empty clusters are re-seeded from the farthest point.
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                              std::vector<double>(x.n_cols, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < x.n_rows; ++i) {
            const auto c = static_cast<std::size_t>(assignments[i]);
            ++counts[c];
            auto row = x.row(i);
            for (std::size_t j = 0; j < x.n_cols; ++j) sums[c][j] += row[j];
        }
        for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
            if (counts[c] == 0) {
                std::size_t far_i = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < x.n_rows; ++i) {
                    const double d =
                        sq_dist(x.row(i), centroids[static_cast<std::size_t>(assignments[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                auto row = x.row(far_i);
                centroids[c].assign(row.begin(), row.end());
            } else {
                for (std::size_t j = 0; j < x.n_cols; ++j)
                    centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
            }
        }
    }
    assign_nearest(x, centroids, assignments);
    res.centroids = std::move(centroids);
    res.assignments = std::move(assignments);
    res.distortion = total_distortion(x, res.centroids, res.assignments);
    return res;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int max_iter, int restarts) {
    if (k < 1) throw Error("kmeans: k must be >= 1");
    if (x.n_rows < static_cast<std::size_t>(k))
        throw TooFewPoints("kmeans needs at least k points");
    restarts = std::max(1, restarts);

    KMeansResult best;
    bool have = false;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, "kmeans/restart", static_cast<std::uint64_t>(r)));
        KMeansResult run = lloyd(x, kmeanspp_seed(x, k, rng), max_iter, seed);
        if (!have || run.distortion < best.distortion) {
            best = std::move(run);
            have = true;
        }
    }
    return best;
}

ElbowResult elbow_scan(const Matrix& x, int k_lo, int k_hi, std::uint64_t seed, int restarts,
                       int max_iter) {
    if (k_lo < 1 || k_hi < k_lo) throw Error("elbow_scan: bad k range");
    if (x.n_rows < static_cast<std::size_t>(k_hi))
        throw TooFewPoints("elbow_scan needs at least k_hi points");

    ElbowResult out;
    std::vector<std::vector<double>> prev_centroids;
    for (int k = k_lo; k <= k_hi; ++k) {
        KMeansResult best = kmeans(x, k, derive_seed(seed, "elbow", static_cast<std::uint64_t>(k)),
                                   max_iter, restarts);
        if (!prev_centroids.empty()) {
            // Warm start: previous centroids plus the farthest point. This run
            // can only improve on the previous k, pinning the curve monotone.
            std::vector<int> assign;
            assign_nearest(x, prev_centroids, assign);
            std::size_t far_i = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < x.n_rows; ++i) {
                const double d =
                    sq_dist(x.row(i), prev_centroids[static_cast<std::size_t>(assign[i])]);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            auto warm = prev_centroids;
            auto row = x.row(far_i);
            warm.emplace_back(row.begin(), row.end());
            KMeansResult warm_run = lloyd(x, std::move(warm), max_iter, seed);
            if (warm_run.distortion < best.distortion) best = std::move(warm_run);
        }
        out.ks.push_back(k);
        out.distortions.push_back(best.distortion);
        prev_centroids = best.centroids;
    }

    // Elbow = largest second difference; ties toward the smaller k. With
    // fewer than three points the curve start is the only choice.
    std::size_t best_i = 0;
    double best_d2 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < out.distortions.size(); ++i) {
        const double d2 = out.distortions[i - 1] - 2.0 * out.distortions[i] + out.distortions[i + 1];
        if (d2 > best_d2) {
            best_d2 = d2;
            best_i = i;
        }
    }
    out.chosen_k = out.ks.empty() ? k_lo : out.ks[best_i];
    return out;
}

std::vector<std::array<double, 2>> project_2d(const Matrix& x) {
    if (x.n_rows < 2) throw TooFewPoints("project_2d needs >= 2 vectors");
    const std::size_t n = x.n_rows, d = x.n_cols;

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    }
    for (auto& m : mean) m /= static_cast<double>(n);

    auto centered = [&](std::size_t i, std::size_t j) { return x(i, j) - mean[j]; };

    // Power iteration on the implicit covariance, with deflation for the
    // second direction and a fixed deterministic start.
    auto power_direction = [&](const std::vector<double>* deflate) {
        std::vector<double> v(d);
        Rng rng(fnv1a64("project2d/start"));
        for (auto& vi : v) vi = rng.uniform_double() - 0.5;
        auto orthogonalize = [&]() {
            if (!deflate) return;
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += v[j] * (*deflate)[j];
            for (std::size_t j = 0; j < d; ++j) v[j] -= dot * (*deflate)[j];
        };
        auto normalize = [&]() {
            double norm = 0.0;
            for (double vi : v) norm += vi * vi;
            norm = std::sqrt(norm);
            if (norm < 1e-12) return false;
            for (auto& vi : v) vi /= norm;
            return true;
        };
        orthogonalize();
        if (!normalize()) return std::vector<double>(d, 0.0);
        std::vector<double> next(d);
        for (int iter = 0; iter < 10000; ++iter) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double proj = 0.0;
                for (std::size_t j = 0; j < d; ++j) proj += centered(i, j) * v[j];
                for (std::size_t j = 0; j < d; ++j) next[j] += proj * centered(i, j);
            }
            for (auto& nj : next) nj /= static_cast<double>(n);
            std::swap(v, next);
            orthogonalize();
            if (!normalize()) return std::vector<double>(d, 0.0);
            double delta = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = std::abs(v[j]) - std::abs(next[j]);
                delta += diff * diff;
            }
            if (delta < 1e-28) break;
        }
        // Sign convention: the largest-magnitude component points positive.
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
        if (v[arg] < 0)
            for (auto& vi : v) vi = -vi;
        return v;
    };

    const std::vector<double> v1 = power_direction(nullptr);
    const std::vector<double> v2 = power_direction(&v1);

    std::vector<std::array<double, 2>> out(n);
    parallel_for(n, [&](std::size_t i) {
        double px = 0.0, py = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double c = centered(i, j);
            px += c * v1[j];
            py += c * v2[j];
        }
        out[i] = {px, py};
    });
    return out;
}

}  // namespace madurl
