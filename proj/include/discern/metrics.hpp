#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "discern/types.hpp"

namespace discern {

/// Cross-tabulation of a predicted clustering against a reference one:
/// counts(i, j) = how many points landed in predicted cluster i and
/// reference class j.
struct ContingencyTable {
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t total = 0;

    static ContingencyTable build(const LabelVector& predicted, const LabelVector& truth);
};

/// Mean silhouette over all points. Per point: a = mean dissimilarity to the
/// rest of its own cluster, b = smallest mean dissimilarity to another
/// cluster, s = (b - a) / max(a, b). Singleton clusters contribute 0, as does
/// the degenerate a = b = 0 case. Dissimilarity is Euclidean distance or
/// 1 - cosine. Throws DomainError when labels contain fewer than 2 clusters.
double silhouette_score(const Dataset& data, const LabelVector& labels, MetricKind metric);

/// Sum over points of the distance to the assigned centroid. The default is
/// the plain norm; squared=true sums squared norms (the variant the elbow
/// curve uses).
double sse(const Dataset& data, const LabelVector& labels, const CentroidSet& centers,
           bool squared = false);

/// Adjusted Rand index via the pair-counting contingency form; 1 for
/// identical partitions, near 0 for independent ones, possibly negative.
/// When the chance-correction denominator is 0, returns 1 if the partitions
/// are identical and 0 otherwise.
double adjusted_rand_index(const LabelVector& predicted, const LabelVector& truth);

/// Fraction of points whose predicted cluster's majority reference class is
/// their own: (1/n) sum over clusters of the majority count.
double purity(const LabelVector& predicted, const LabelVector& truth);

struct EvaluationReport {
    double silhouette = 0.0;
    double sse = 0.0;
    std::optional<double> ari;
    std::optional<double> purity;
};

/// Bundle silhouette + SSE for a clustering, plus ARI/purity when a
/// ground-truth labeling is supplied.
EvaluationReport evaluate(const Dataset& data, const LabelVector& labels,
                          const CentroidSet& centers,
                          const std::optional<LabelVector>& truth = std::nullopt);

}  // namespace discern
