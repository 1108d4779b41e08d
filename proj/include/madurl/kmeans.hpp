#pragma once

#include <array>
#include <vector>

#include "madurl/tree.hpp"  // Matrix

namespace madurl {

struct TooFewPoints : Error {
    explicit TooFewPoints(const std::string& what) : Error("too few points: " + what) {}
};

struct KMeansResult {
    int k = 0;
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignments;
    double distortion = 0.0;  // sum of squared distances to assigned centroid
    int iterations = 0;
    std::uint64_t seed = 0;
    std::vector<double> distortion_trace;  // per Lloyd iteration, non-increasing
};

// Nearest-centroid assignment, the hot kernel. The parallel entry point and
// the serial reference produce identical assignments; the bench target and
// tests compare them.
void assign_nearest(const Matrix& x, const std::vector<std::vector<double>>& centroids,
                    std::vector<int>& assignments);
void assign_nearest_serial(const Matrix& x, const std::vector<std::vector<double>>& centroids,
                           std::vector<int>& assignments);

// Lloyd iterations from k-means++ seeding, best distortion over `restarts`
// independently seeded runs. Empty clusters are re-seeded from the farthest
// point. Pure function of (x, k, seed, max_iter, restarts).
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int max_iter = 100,
                    int restarts = 1);

struct ElbowResult {
    std::vector<int> ks;
    std::vector<double> distortions;
    int chosen_k = 0;
};

// Distortion curve over k = k_lo..k_hi with best-of-restarts per k plus a
// warm start from the previous k (which pins the curve non-increasing);
// the elbow is the largest second difference of the curve.
ElbowResult elbow_scan(const Matrix& x, int k_lo, int k_hi, std::uint64_t seed, int restarts = 5,
                       int max_iter = 100);

// Projection onto the top two principal directions (power iteration on the
// centered data, deterministic sign convention). Rank-deficient data
// degrades to zeros on the missing axes.
std::vector<std::array<double, 2>> project_2d(const Matrix& x);

}  // namespace madurl
