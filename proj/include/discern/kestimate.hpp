#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "discern/types.hpp"

namespace discern {

/// One K-estimation sweep: per-k best-of-runs scores (SSE for elbow, mean
/// silhouette for the silhouette scan) and the chosen k. low_confidence is
/// set when the decision had essentially nothing to go on (flat knee curve).
struct ScanResult {
    std::vector<int> k_values;
    std::vector<double> scores;
    int chosen_k = 0;
    int runs_per_k = 0;
    std::uint64_t seed = 0;
    bool low_confidence = false;
};

/// Knee of a score curve: after normalizing both axes to [0, 1], the interior
/// point with the largest drop below the endpoint chord. Ties go to the
/// smallest k. Invariant under any affine rescaling of the scores; needs at
/// least 3 points and strictly increasing k_values.
int knee_detect(std::span<const int> k_values, std::span<const double> scores);

/// knee_detect plus its decision margin (the normalized chord drop).
struct KneePoint {
    int k = 0;
    double strength = 0.0;
};
KneePoint knee_point(std::span<const int> k_values, std::span<const double> scores);

/// For each k in [k_lo, k_hi], run k-means++ runs_per_k times and keep the
/// highest silhouette; chosen_k is the argmax (ties -> smallest k).
/// Requires 2 <= k_lo <= k_hi <= n-1. Cells run in parallel; per-cell seeds
/// derive from (seed, k, run), so results do not depend on scheduling.
ScanResult silhouette_scan(const Dataset& data, int k_lo, int k_hi, int runs_per_k = 10,
                           std::uint64_t seed = 0);

/// For each k in [k_lo, k_hi], run k-means++ runs_per_k times and keep the
/// lowest sum of squared distances; chosen_k is the knee of that curve.
/// Requires a range of at least 3 values (the knee needs interior points).
ScanResult elbow_scan(const Dataset& data, int k_lo, int k_hi, int runs_per_k = 10,
                      std::uint64_t seed = 0);

/// Default scan ceiling when the caller gives no bound: min(n-1, 3*ceil(sqrt(n))).
int default_k_hi(std::size_t n);

}  // namespace discern
