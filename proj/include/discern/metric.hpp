#pragma once

#include <span>

#include "discern/types.hpp"

namespace discern {

/// Euclidean (L2) distance. Throws DomainError on dimension mismatch.
double euclidean_distance(std::span<const double> x, std::span<const double> y);

/// Cosine similarity in [-1, 1]. Throws DomainError on dimension mismatch or
/// when either vector has zero norm.
double cosine_similarity(std::span<const double> x, std::span<const double> y);

/// Dissimilarity under a metric: Euclidean distance, or 1 - cosine similarity.
double dissimilarity(std::span<const double> x, std::span<const double> y, MetricKind metric);

double dot(std::span<const double> x, std::span<const double> y);
double squared_norm(std::span<const double> x);
double squared_distance(std::span<const double> x, std::span<const double> y);

}  // namespace discern
