#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "discern/types.hpp"

namespace discern {

enum class InitMethod { Random, PlusPlus, Provided };

std::string to_string(InitMethod init);

struct KMeansConfig {
    int k = 2;
    int max_iterations = 300;
    MetricKind metric = MetricKind::Euclidean;
    InitMethod init = InitMethod::PlusPlus;
    std::uint64_t seed = 0;
    /// Required when init == Provided; ignored otherwise.
    std::optional<CentroidSet> provided_centroids;
    /// Stop when the relative SSE improvement falls below this. 0 means
    /// labels-stable stopping only.
    double convergence_tol = 0.0;
    /// Renormalize centroids after each mean update under Cosine (spherical
    /// update). No effect under Euclidean.
    bool normalize_centroids = true;
};

struct ClusteringResult {
    LabelVector labels;
    CentroidSet centroids;
    /// Within-cluster sum of squared distances after each completed
    /// iteration; computed on the unit sphere for cosine runs. Non-increasing.
    std::vector<double> sse_trace;
    int iterations_run = 0;
    bool converged = false;
};

/// Map each point to its nearest centroid: minimum Euclidean distance, or
/// maximum cosine similarity. Ties go to the smallest centroid index.
/// Zero-norm centroids under Cosine are treated as orthogonal to everything.
LabelVector assign(const Dataset& data, const CentroidSet& centers, MetricKind metric);

/// Mean of each cluster's points; under Cosine the mean is L2-normalized.
/// An empty cluster is reseeded to the point farthest (under `metric`) from
/// its own centroid, drawn from clusters that keep at least one member.
CentroidSet update_centroids(const Dataset& data, const LabelVector& labels, int k,
                             MetricKind metric);

/// k distinct rows, sampled uniformly without replacement.
CentroidSet random_init(const Dataset& data, int k, std::uint64_t seed);

/// k-means++ seeding: first row uniform, then rows with probability
/// proportional to squared distance from the chosen set. Under Cosine the
/// distances are Euclidean on L2-normalized rows.
CentroidSet kmeanspp_init(const Dataset& data, int k, std::uint64_t seed);

/// Lloyd iteration: assign, update, repeat until labels stop changing, the
/// relative SSE improvement drops below convergence_tol, or max_iterations
/// pass. converged reports whether a stop condition fired before the
/// iteration cap. Runs with Provided init are fully deterministic.
ClusteringResult kmeans_run(const Dataset& data, const KMeansConfig& config);

}  // namespace discern
