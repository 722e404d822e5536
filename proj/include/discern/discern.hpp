#pragma once

#include <optional>
#include <span>
#include <vector>

#include "discern/similarity.hpp"
#include "discern/types.hpp"

namespace discern {

/// Running state of the diversity-selection sweep. For every column j,
/// col_max/col_min hold the max/min similarity between point j and the
/// points selected so far, and p[j] holds the selection objective
///   p = col_max^2 * col_min * (col_max - col_min)
/// for unselected columns (+inf marks selected ones). Exposed so the
/// incremental bookkeeping can be checked against recomputation from scratch.
struct DiversityState {
    std::vector<int> selected;
    std::vector<char> is_selected;
    std::vector<double> col_max;
    std::vector<double> col_min;
    std::vector<double> p;

    /// Start a sweep by selecting the least-similar pair of points.
    static DiversityState seed(const SimilarityMatrix& s);

    /// Refresh p for all unselected columns and return (min p, argmin column);
    /// ties resolve to the smallest column index.
    std::pair<double, int> evaluate();

    /// Fold point `index` into the selection and the running column stats.
    void add(const SimilarityMatrix& s, int index);
};

/// Result of running the sweep for l_max steps: the selection order, and the
/// objective trace r_values where r_values[j] is the minimum of p once j
/// points were selected (r_values[0] = r_values[1] = 0 by convention).
struct DiversityScan {
    std::vector<int> order;
    std::vector<double> r_values;
};

/// Run the diversity sweep until l_max points are selected, 2 <= l_max <= n.
DiversityScan diversity_scan(const SimilarityMatrix& s, int l_max);

/// Signed curvature kappa = R'' / (1 + R'^2)^(3/2) of a uniformly sampled
/// trace, with derivatives by central differences (one-sided at the two
/// ends). Needs at least 4 samples.
std::vector<double> signed_curvature(std::span<const double> r_values);

/// Index of the minimum curvature over [k_min, k_max]; ties resolve to the
/// smallest index. k_max defaults to kappa.size() - 2, which keeps the
/// one-sided right boundary sample out of the search.
int estimate_k(std::span<const double> kappa, int k_min = 2,
               std::optional<int> k_max = std::nullopt);

/// The trace behind a K decision. kappa is empty when the scan was too short
/// to differentiate (fewer than 4 samples).
struct KEstimationCurve {
    std::vector<double> r_values;
    std::vector<double> kappa;
    int estimated_k = 0;
};

struct DiscernOptions {
    /// Select exactly this many centroids and skip estimation.
    std::optional<int> fixed_k;
    /// Cap on the sweep length when estimating (default: all n points).
    /// Mutually exclusive with fixed_k.
    std::optional<int> k_max;
};

struct DiscernResult {
    std::vector<int> centroid_indices;
    CentroidSet centroids;
    KEstimationCurve curve;
};

/// Deterministic centroid seeding: build the cosine similarity matrix, run
/// the diversity sweep, and (unless fixed_k is given) pick K at the curvature
/// minimum over [3, l_max - 2]. Centroids are actual data rows.
DiscernResult discern_init(const Dataset& data, const DiscernOptions& options = {});

}  // namespace discern
