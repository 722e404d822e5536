#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "discern/types.hpp"

namespace discern {

/// Symmetric n x n matrix of pairwise cosine similarities with a unit
/// diagonal. Stored dense; set() mirrors automatically.
class SimilarityMatrix {
public:
    explicit SimilarityMatrix(std::size_t n);

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, double value) {
        values_[i * n_ + j] = value;
        values_[j * n_ + i] = value;
    }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

/// Pairwise cosine similarities of all dataset rows, regardless of the
/// dataset's clustering metric. Rows are normalized once, then each (i, j)
/// pair costs one dot product; entries are clamped to [-1, 1]. Parallel over
/// rows with bit-identical output for any worker count.
/// Throws DomainError (with the row index) if a row has zero norm.
SimilarityMatrix build_similarity_matrix(const Dataset& data);

/// Position of the smallest entry strictly above the diagonal; ties resolve
/// to the lexicographically smallest (i, j). Throws DomainError when n < 2.
std::pair<std::size_t, std::size_t> min_similarity_pair(const SimilarityMatrix& s);

}  // namespace discern
