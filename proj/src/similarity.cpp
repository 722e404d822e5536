#include "discern/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "discern/metric.hpp"
#include "discern/parallel.hpp"

namespace discern {

SimilarityMatrix::SimilarityMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) values_[i * n_ + i] = 1.0;
}

SimilarityMatrix build_similarity_matrix(const Dataset& data) {
    const std::size_t n = data.size();
    const std::size_t d = data.dim();

    Matrix unit(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        const double sq = squared_norm(row);
        if (sq == 0.0)
            throw DomainError("row " + std::to_string(i) +
                              " has zero norm; cosine similarity is undefined for it");
        const double inv = 1.0 / std::sqrt(sq);
        auto out = unit.row(i);
        for (std::size_t j = 0; j < d; ++j) out[j] = row[j] * inv;
    }

    SimilarityMatrix s(n);
    parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto xi = unit.row(i);
            for (std::size_t j = i + 1; j < n; ++j) {
                const double cos = std::clamp(dot(xi, unit.row(j)), -1.0, 1.0);
                s.set(i, j, cos);
            }
        }
    });
    return s;
}

std::pair<std::size_t, std::size_t> min_similarity_pair(const SimilarityMatrix& s) {
    const std::size_t n = s.size();
    if (n < 2) throw DomainError("need at least 2 points to pick a pair");
    std::size_t best_i = 0, best_j = 1;
    double best = s(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = s.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (row[j] < best) {  // strict: ties keep the lexicographically first pair
                best = row[j];
                best_i = i;
                best_j = j;
            }
        }
    }
    return {best_i, best_j};
}

}  // namespace discern
