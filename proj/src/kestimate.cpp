#include "discern/kestimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "discern/kmeans.hpp"
#include "discern/metrics.hpp"
#include "discern/parallel.hpp"
#include "discern/rng.hpp"

namespace discern {

KneePoint knee_point(std::span<const int> k_values, std::span<const double> scores) {
    const std::size_t n = k_values.size();
    if (n != scores.size())
        throw DomainError("k_values and scores differ in length");
    if (n < 3) throw DomainError("knee detection needs at least 3 points, got " + std::to_string(n));
    for (std::size_t i = 1; i < n; ++i)
        if (k_values[i] <= k_values[i - 1]) throw DomainError("k_values must be strictly increasing");

    const double lo = *std::min_element(scores.begin(), scores.end());
    const double hi = *std::max_element(scores.begin(), scores.end());
    const double y_span = hi - lo;
    const double x_span = static_cast<double>(k_values.back() - k_values.front());

    // Normalized drop below the endpoint chord, per interior point.
    auto drop = [&](std::size_t i) {
        const double x = static_cast<double>(k_values[i] - k_values.front()) / x_span;
        const double y = y_span > 0.0 ? (scores[i] - lo) / y_span : 0.0;
        const double y0 = y_span > 0.0 ? (scores.front() - lo) / y_span : 0.0;
        const double y1 = y_span > 0.0 ? (scores.back() - lo) / y_span : 0.0;
        return y0 + (y1 - y0) * x - y;
    };

    std::size_t best = 1;
    double best_drop = drop(1);
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double d = drop(i);
        if (d > best_drop) {  // strict: ties keep the smallest k
            best_drop = d;
            best = i;
        }
    }
    return {k_values[best], best_drop};
}

int knee_detect(std::span<const int> k_values, std::span<const double> scores) {
    return knee_point(k_values, scores).k;
}

int default_k_hi(std::size_t n) {
    const auto cap = static_cast<int>(3.0 * std::ceil(std::sqrt(static_cast<double>(n))));
    return std::min(static_cast<int>(n) - 1, cap);
}

namespace {

void check_range(const Dataset& data, int k_lo, int k_hi, int runs_per_k, int min_span) {
    const int n = static_cast<int>(data.size());
    if (k_lo < 2 || k_hi < k_lo || k_hi > n - 1)
        throw DomainError("k range [" + std::to_string(k_lo) + ", " + std::to_string(k_hi) +
                          "] not within [2, " + std::to_string(n - 1) + "]");
    if (k_hi - k_lo + 1 < min_span)
        throw DomainError("k range must span at least " + std::to_string(min_span) + " values");
    if (runs_per_k < 1) throw DomainError("runs_per_k must be at least 1");
}

// Best-of-runs score for every k in the range. Cells (k, run) execute in
// parallel with derived seeds, so the grid is schedule-independent.
std::vector<double> run_grid(const Dataset& data, int k_lo, int k_hi, int runs_per_k,
                             std::uint64_t seed, bool use_silhouette) {
    const std::size_t nk = static_cast<std::size_t>(k_hi - k_lo + 1);
    const std::size_t runs = static_cast<std::size_t>(runs_per_k);
    std::vector<double> cell(nk * runs);

    parallel_for(0, nk * runs, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            const int k = k_lo + static_cast<int>(c / runs);
            const auto run = static_cast<std::uint64_t>(c % runs);
            KMeansConfig config;
            config.k = k;
            config.metric = data.metric();
            config.init = InitMethod::PlusPlus;
            config.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(k), run);
            const ClusteringResult result = kmeans_run(data, config);
            if (use_silhouette) {
                // A run can collapse below 2 clusters on pathological
                // (all-duplicate) data; score it as unusable rather than fail
                // the whole scan.
                try {
                    cell[c] = silhouette_score(data, result.labels, data.metric());
                } catch (const DomainError&) {
                    cell[c] = -2.0;
                }
            } else {
                cell[c] = result.sse_trace.back();
            }
        }
    });

    std::vector<double> best(nk);
    for (std::size_t i = 0; i < nk; ++i) {
        auto begin = cell.begin() + static_cast<std::ptrdiff_t>(i * runs);
        auto end = begin + static_cast<std::ptrdiff_t>(runs);
        best[i] = use_silhouette ? *std::max_element(begin, end) : *std::min_element(begin, end);
    }
    return best;
}

std::vector<int> make_k_values(int k_lo, int k_hi) {
    std::vector<int> ks(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = k_lo + static_cast<int>(i);
    return ks;
}

}  // namespace

ScanResult silhouette_scan(const Dataset& data, int k_lo, int k_hi, int runs_per_k,
                           std::uint64_t seed) {
    check_range(data, k_lo, k_hi, runs_per_k, 1);
    ScanResult result;
    result.k_values = make_k_values(k_lo, k_hi);
    result.scores = run_grid(data, k_lo, k_hi, runs_per_k, seed, true);
    result.runs_per_k = runs_per_k;
    result.seed = seed;
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.scores.size(); ++i)
        if (result.scores[i] > result.scores[best]) best = i;
    result.chosen_k = result.k_values[best];
    return result;
}

ScanResult elbow_scan(const Dataset& data, int k_lo, int k_hi, int runs_per_k,
                      std::uint64_t seed) {
    check_range(data, k_lo, k_hi, runs_per_k, 3);
    ScanResult result;
    result.k_values = make_k_values(k_lo, k_hi);
    result.scores = run_grid(data, k_lo, k_hi, runs_per_k, seed, false);
    result.runs_per_k = runs_per_k;
    result.seed = seed;
    const KneePoint knee = knee_point(result.k_values, result.scores);
    result.chosen_k = knee.k;
    result.low_confidence = knee.strength < 1e-9;
    return result;
}

}  // namespace discern
