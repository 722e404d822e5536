#include "discern/types.hpp"

#include <algorithm>
#include <cmath>

namespace discern {

ParseError::ParseError(const std::string& file, std::size_t line, std::size_t column,
                       const std::string& what)
    : InputError(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what) {}

std::string to_string(MetricKind metric) {
    return metric == MetricKind::Euclidean ? "euclidean" : "cosine";
}

MetricKind metric_from_string(const std::string& name) {
    if (name == "euclidean") return MetricKind::Euclidean;
    if (name == "cosine") return MetricKind::Cosine;
    throw InputError("unknown metric '" + name + "' (expected 'euclidean' or 'cosine')");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols())
            throw InputError("ragged rows: row " + std::to_string(i) + " has " +
                             std::to_string(rows[i].size()) + " values, expected " +
                             std::to_string(m.cols()));
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

Dataset::Dataset(Matrix features, MetricKind metric, std::optional<LabelVector> labels)
    : features_(std::move(features)), metric_(metric), labels_(std::move(labels)) {
    const std::size_t n = features_.rows();
    const std::size_t d = features_.cols();
    if (n < 2) throw DomainError("dataset needs at least 2 points, got " + std::to_string(n));
    if (d < 1) throw DomainError("dataset needs at least 1 feature");

    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        for (double v : features_.row(i)) {
            if (!std::isfinite(v))
                throw DomainError("non-finite value in row " + std::to_string(i));
            sq += v * v;
        }
        if (metric_ == MetricKind::Cosine && sq == 0.0)
            throw DomainError("row " + std::to_string(i) +
                              " has zero norm; cosine similarity is undefined for it");
    }

    if (labels_) {
        if (labels_->size() != n)
            throw InputError("label count " + std::to_string(labels_->size()) +
                             " does not match point count " + std::to_string(n));
        int max_label = -1;
        for (int c : *labels_) {
            if (c < 0) throw InputError("negative class id " + std::to_string(c));
            max_label = std::max(max_label, c);
        }
        std::vector<char> seen(static_cast<std::size_t>(max_label) + 1, 0);
        for (int c : *labels_) seen[static_cast<std::size_t>(c)] = 1;
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw InputError("class ids must be contiguous from 0");
        num_classes_ = max_label + 1;
    }
}

}  // namespace discern
