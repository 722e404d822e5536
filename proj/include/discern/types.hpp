#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace discern {

/// Unusable input: bad files, malformed arguments, shape mismatches.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file that could not be parsed. Carries file/line/column context in the message.
class ParseError : public InputError {
public:
    ParseError(const std::string& file, std::size_t line, std::size_t column,
               const std::string& what);
};

/// Violated numeric precondition: zero-norm vector, out-of-range k, and so on.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MetricKind { Euclidean, Cosine };

std::string to_string(MetricKind metric);
MetricKind metric_from_string(const std::string& name);

/// Dense row-major matrix of doubles. Rows are points, columns are features.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using LabelVector = std::vector<int>;

/// An immutable point set, the metric it should be clustered under, and an
/// optional ground-truth labeling (contiguous ids starting at 0).
///
/// Construction validates the whole bundle: at least two points and one
/// feature, every value finite, no zero-norm rows when the metric is cosine,
/// and labels (if any) matching the point count.
class Dataset {
public:
    Dataset(Matrix features, MetricKind metric,
            std::optional<LabelVector> labels = std::nullopt);

    const Matrix& features() const { return features_; }
    std::span<const double> row(std::size_t i) const { return features_.row(i); }
    std::size_t size() const { return features_.rows(); }
    std::size_t dim() const { return features_.cols(); }
    MetricKind metric() const { return metric_; }
    const std::optional<LabelVector>& labels() const { return labels_; }
    /// Number of distinct ground-truth classes; 0 when unlabeled.
    int num_classes() const { return num_classes_; }

private:
    Matrix features_;
    MetricKind metric_;
    std::optional<LabelVector> labels_;
    int num_classes_ = 0;
};

/// A bundle of k centroids. When the centroids are actual data rows (seeding
/// by selection), source_indices records which ones.
struct CentroidSet {
    Matrix centers;
    std::optional<std::vector<int>> source_indices;

    std::size_t k() const { return centers.rows(); }
    std::size_t dim() const { return centers.cols(); }
};

}  // namespace discern
