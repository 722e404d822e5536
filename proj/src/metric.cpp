#include "discern/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace discern {

namespace {

void check_dims(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DomainError("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()));
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double squared_norm(std::span<const double> x) { return dot(x, x); }

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        acc += diff * diff;
    }
    return acc;
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
    check_dims(x, y);
    return std::sqrt(squared_distance(x, y));
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
    check_dims(x, y);
    const double nx = squared_norm(x);
    const double ny = squared_norm(y);
    if (nx == 0.0 || ny == 0.0)
        throw DomainError("cosine similarity undefined for a zero-norm vector");
    const double cos = dot(x, y) / (std::sqrt(nx) * std::sqrt(ny));
    return std::clamp(cos, -1.0, 1.0);
}

double dissimilarity(std::span<const double> x, std::span<const double> y, MetricKind metric) {
    if (metric == MetricKind::Euclidean) return euclidean_distance(x, y);
    return 1.0 - cosine_similarity(x, y);
}

}  // namespace discern
