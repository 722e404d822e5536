#pragma once

#include <optional>
#include <string>

#include "discern/discern.hpp"
#include "discern/kestimate.hpp"
#include "discern/kmeans.hpp"
#include "discern/metrics.hpp"
#include "discern/types.hpp"

namespace discern {

/// Where and how to read a dataset. labels_path and label_column are
/// mutually exclusive ways to attach ground truth.
struct DatasetSpec {
    std::string features_path;
    std::optional<std::string> labels_path;
    char delimiter = ',';
    bool has_header = false;
    MetricKind metric = MetricKind::Euclidean;
    std::optional<int> label_column;
};

/// Load and validate a dataset from CSV (RFC-4180-style quoting). Labels --
/// from a column or a side file -- are normalized to contiguous 0-based ids
/// in first-appearance order (already-contiguous integer ids are kept as
/// written). Malformed cells raise ParseError with file:line:column; rows
/// with non-finite values and zero rows under Cosine raise DomainError with
/// the row index; a label/feature count mismatch raises InputError naming
/// both counts.
Dataset load_dataset(const DatasetSpec& spec);

/// Label file: either a single column of labels, or an "index,label" CSV as
/// written by save_labels_csv. Values are normalized like dataset labels.
LabelVector load_labels(const std::string& path);

/// True when the first row of the file has no numeric cell (so it can only
/// be a header).
bool sniff_header(const std::string& path, char delimiter = ',');

enum class OutputFormat { Csv, Json };

OutputFormat format_from_string(const std::string& name);

/// Shortest text that round-trips the double exactly (17 significant digits).
std::string format_double(double value);

// Serialization: deterministic byte-for-byte output -- fixed key order, LF
// line endings, round-trip-exact floats. CSV projections of the richer
// result types are lossy (the JSON forms are complete).

void save_labels_csv(const LabelVector& labels, const std::string& path);
void save_matrix_csv(const Matrix& matrix, const std::string& path);
void save_curve_csv(const KEstimationCurve& curve, const std::string& path);

void save_result(const ClusteringResult& result, const std::string& path, OutputFormat format);
void save_result(const DiscernResult& result, const std::string& path, OutputFormat format);
void save_result(const ScanResult& result, const std::string& path, OutputFormat format);
void save_result(const EvaluationReport& report, const std::string& path, OutputFormat format);

LabelVector load_labels_csv(const std::string& path);
Matrix load_matrix_csv(const std::string& path);
KEstimationCurve load_curve_csv(const std::string& path);
ClusteringResult load_clustering_json(const std::string& path);
DiscernResult load_discern_json(const std::string& path);
ScanResult load_scan_json(const std::string& path);
ScanResult load_scan_csv(const std::string& path);
EvaluationReport load_report_json(const std::string& path);
EvaluationReport load_report_csv(const std::string& path);

}  // namespace discern
