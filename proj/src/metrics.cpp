#include "discern/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "discern/metric.hpp"
#include "discern/parallel.hpp"

namespace discern {

namespace {

int class_count(const LabelVector& labels, const char* what) {
    int max_label = -1;
    for (int c : labels) {
        if (c < 0) throw DomainError(std::string(what) + ": negative class id");
        max_label = std::max(max_label, c);
    }
    return max_label + 1;
}

inline double binom2(std::int64_t x) {
    return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1);
}

// Same partition up to renaming: every row and every column of the
// contingency table has exactly one nonzero entry.
bool identical_partitions(const ContingencyTable& t) {
    for (const auto& row : t.counts)
        if (std::count_if(row.begin(), row.end(), [](std::int64_t v) { return v > 0; }) != 1)
            return false;
    for (std::size_t j = 0; j < t.col_sums.size(); ++j) {
        int nonzero = 0;
        for (const auto& row : t.counts) nonzero += row[j] > 0;
        if (nonzero != 1) return false;
    }
    return true;
}

}  // namespace

ContingencyTable ContingencyTable::build(const LabelVector& predicted, const LabelVector& truth) {
    if (predicted.size() != truth.size())
        throw DomainError("label vectors differ in length: " + std::to_string(predicted.size()) +
                          " vs " + std::to_string(truth.size()));
    if (predicted.empty()) throw DomainError("empty labelings");

    const int k = class_count(predicted, "predicted");
    const int t = class_count(truth, "truth");
    ContingencyTable table;
    table.counts.assign(static_cast<std::size_t>(k),
                        std::vector<std::int64_t>(static_cast<std::size_t>(t), 0));
    table.row_sums.assign(static_cast<std::size_t>(k), 0);
    table.col_sums.assign(static_cast<std::size_t>(t), 0);
    table.total = static_cast<std::int64_t>(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const auto r = static_cast<std::size_t>(predicted[i]);
        const auto c = static_cast<std::size_t>(truth[i]);
        ++table.counts[r][c];
        ++table.row_sums[r];
        ++table.col_sums[c];
    }
    return table;
}

double silhouette_score(const Dataset& data, const LabelVector& labels, MetricKind metric) {
    const std::size_t n = data.size();
    if (labels.size() != n)
        throw DomainError("label count " + std::to_string(labels.size()) +
                          " does not match point count " + std::to_string(n));
    const int k = class_count(labels, "labels");
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k), 0);
    for (int c : labels) ++sizes[static_cast<std::size_t>(c)];
    if (std::count_if(sizes.begin(), sizes.end(), [](std::int64_t s) { return s > 0; }) < 2)
        throw DomainError("silhouette needs at least 2 clusters");

    std::vector<double> s(n, 0.0);
    parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> cluster_sum(static_cast<std::size_t>(k));
        for (std::size_t i = lo; i < hi; ++i) {
            const auto own = static_cast<std::size_t>(labels[i]);
            if (sizes[own] <= 1) continue;  // singleton: s = 0
            std::fill(cluster_sum.begin(), cluster_sum.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                cluster_sum[static_cast<std::size_t>(labels[j])] +=
                    dissimilarity(data.row(i), data.row(j), metric);
            }
            const double a = cluster_sum[own] / static_cast<double>(sizes[own] - 1);
            double b = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
                if (c == own || sizes[c] == 0) continue;
                b = std::min(b, cluster_sum[c] / static_cast<double>(sizes[c]));
            }
            const double denom = std::max(a, b);
            s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
        }
    });

    double total = 0.0;
    for (double v : s) total += v;
    return total / static_cast<double>(n);
}

double sse(const Dataset& data, const LabelVector& labels, const CentroidSet& centers,
           bool squared) {
    const std::size_t n = data.size();
    if (labels.size() != n)
        throw DomainError("label count " + std::to_string(labels.size()) +
                          " does not match point count " + std::to_string(n));
    if (centers.dim() != data.dim())
        throw DomainError("centroid dimension " + std::to_string(centers.dim()) +
                          " does not match data dimension " + std::to_string(data.dim()));
    const auto k = static_cast<int>(centers.k());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0 || labels[i] >= k)
            throw DomainError("label " + std::to_string(labels[i]) + " outside [0, " +
                              std::to_string(k) + ")");
        const double d2 =
            squared_distance(data.row(i), centers.centers.row(static_cast<std::size_t>(labels[i])));
        total += squared ? d2 : std::sqrt(d2);
    }
    return total;
}

double adjusted_rand_index(const LabelVector& predicted, const LabelVector& truth) {
    const ContingencyTable table = ContingencyTable::build(predicted, truth);

    double index = 0.0;
    for (const auto& row : table.counts)
        for (std::int64_t v : row) index += binom2(v);
    double rows = 0.0, cols = 0.0;
    for (std::int64_t v : table.row_sums) rows += binom2(v);
    for (std::int64_t v : table.col_sums) cols += binom2(v);

    const double pairs = binom2(table.total);
    const double expected = pairs > 0.0 ? rows * cols / pairs : 0.0;
    const double max_index = 0.5 * (rows + cols);
    const double denom = max_index - expected;
    if (denom == 0.0) return identical_partitions(table) ? 1.0 : 0.0;
    return (index - expected) / denom;
}

double purity(const LabelVector& predicted, const LabelVector& truth) {
    const ContingencyTable table = ContingencyTable::build(predicted, truth);
    std::int64_t majority = 0;
    for (const auto& row : table.counts)
        majority += *std::max_element(row.begin(), row.end());
    return static_cast<double>(majority) / static_cast<double>(table.total);
}

EvaluationReport evaluate(const Dataset& data, const LabelVector& labels,
                          const CentroidSet& centers, const std::optional<LabelVector>& truth) {
    EvaluationReport report;
    report.silhouette = silhouette_score(data, labels, data.metric());
    report.sse = sse(data, labels, centers);
    if (truth) {
        report.ari = adjusted_rand_index(labels, *truth);
        report.purity = purity(labels, *truth);
    }
    return report;
}

}  // namespace discern
