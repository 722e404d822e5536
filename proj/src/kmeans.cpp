#include "discern/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "discern/metric.hpp"
#include "discern/parallel.hpp"
#include "discern/rng.hpp"

namespace discern {

namespace {

Matrix normalized_rows(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double sq = squared_norm(m.row(i));
        if (sq == 0.0)
            throw DomainError("row " + std::to_string(i) +
                              " has zero norm; cosine clustering is undefined for it");
        const double inv = 1.0 / std::sqrt(sq);
        const auto src = m.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j] * inv;
    }
    return out;
}

// Unit directions of the rows; zero-norm rows stay zero (treated as
// orthogonal to everything downstream).
Matrix row_directions(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double sq = squared_norm(m.row(i));
        if (sq == 0.0) continue;
        const double inv = 1.0 / std::sqrt(sq);
        const auto src = m.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j] * inv;
    }
    return out;
}

LabelVector assign_impl(const Matrix& points, const Matrix& centers, MetricKind metric) {
    const std::size_t n = points.rows();
    const std::size_t k = centers.rows();
    LabelVector labels(n, 0);
    if (metric == MetricKind::Euclidean) {
        parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < k; ++j) {
                    const double d = squared_distance(points.row(i), centers.row(j));
                    if (d < best) {  // strict: ties keep the smallest index
                        best = d;
                        labels[i] = static_cast<int>(j);
                    }
                }
            }
        });
    } else {
        const Matrix dirs = row_directions(centers);
        parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < k; ++j) {
                    const double sim = dot(points.row(i), dirs.row(j));
                    if (sim > best) {
                        best = sim;
                        labels[i] = static_cast<int>(j);
                    }
                }
            }
        });
    }
    return labels;
}

double cosine_to_center(std::span<const double> x, std::span<const double> z) {
    const double nx = squared_norm(x);
    const double nz = squared_norm(z);
    if (nx == 0.0 || nz == 0.0) return 0.0;
    return dot(x, z) / std::sqrt(nx * nz);
}

Matrix update_impl(const Matrix& points, const LabelVector& labels, int k, MetricKind metric,
                   bool normalize) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    const std::size_t kk = static_cast<std::size_t>(k);

    Matrix centers(kk, d, 0.0);
    std::vector<std::size_t> sizes(kk, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto acc = centers.row(static_cast<std::size_t>(labels[i]));
        const auto x = points.row(i);
        for (std::size_t j = 0; j < d; ++j) acc[j] += x[j];
        ++sizes[static_cast<std::size_t>(labels[i])];
    }
    for (std::size_t c = 0; c < kk; ++c) {
        if (sizes[c] == 0) continue;
        auto z = centers.row(c);
        const double inv = 1.0 / static_cast<double>(sizes[c]);
        for (std::size_t j = 0; j < d; ++j) z[j] *= inv;
        if (metric == MetricKind::Cosine && normalize) {
            const double sq = squared_norm(z);
            if (sq > 0.0) {
                const double rescale = 1.0 / std::sqrt(sq);
                for (std::size_t j = 0; j < d; ++j) z[j] *= rescale;
            }
        }
    }

    // Reseed empty clusters to the point farthest from its own centroid,
    // drawing only from clusters that keep at least one member. Labels are
    // not rewritten; the next assignment pass picks the change up.
    std::vector<char> grabbed(n, 0);
    for (std::size_t c = 0; c < kk; ++c) {
        if (sizes[c] != 0) continue;
        double worst = -std::numeric_limits<double>::infinity();
        std::size_t worst_i = n;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t home = static_cast<std::size_t>(labels[i]);
            if (grabbed[i] || sizes[home] <= 1) continue;
            const double badness =
                metric == MetricKind::Euclidean
                    ? squared_distance(points.row(i), centers.row(home))
                    : -cosine_to_center(points.row(i), centers.row(home));
            if (badness > worst) {
                worst = badness;
                worst_i = i;
            }
        }
        if (worst_i == n) break;  // nothing left to split; leave the zero row
        const auto src = points.row(worst_i);
        std::copy(src.begin(), src.end(), centers.row(c).begin());
        grabbed[worst_i] = 1;
        --sizes[static_cast<std::size_t>(labels[worst_i])];
    }
    return centers;
}

// Trace objective: plain squared distances for Euclidean; for cosine both
// sides live on the unit sphere, so each term is 2 - 2*cos (zero-norm
// centroids count as orthogonal).
double trace_sse(const Matrix& points, const LabelVector& labels, const Matrix& centers,
                 MetricKind metric) {
    double total = 0.0;
    if (metric == MetricKind::Euclidean) {
        for (std::size_t i = 0; i < points.rows(); ++i)
            total += squared_distance(points.row(i), centers.row(static_cast<std::size_t>(labels[i])));
    } else {
        const Matrix dirs = row_directions(centers);
        for (std::size_t i = 0; i < points.rows(); ++i)
            total += 2.0 - 2.0 * dot(points.row(i), dirs.row(static_cast<std::size_t>(labels[i])));
    }
    return total;
}

std::vector<std::size_t> random_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    rng::Engine engine(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i)
        std::swap(idx[i], idx[i + rng::uniform_index(engine, n - i)]);
    idx.resize(k);
    return idx;
}

std::vector<std::size_t> pp_indices(const Matrix& work, std::size_t k, std::uint64_t seed) {
    rng::Engine engine(seed);
    const std::size_t n = work.rows();
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    chosen.push_back(rng::uniform_index(engine, n));

    std::vector<double> dist2(n);
    std::vector<char> is_chosen(n, 0);
    is_chosen[chosen[0]] = 1;
    for (std::size_t i = 0; i < n; ++i)
        dist2[i] = squared_distance(work.row(i), work.row(chosen[0]));

    while (chosen.size() < k) {
        double total = 0.0;
        for (double v : dist2) total += v;
        std::size_t pick = n;
        if (total > 0.0) {
            const double r = rng::uniform_unit(engine) * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += dist2[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {  // fp rounding: fall back to the last positive weight
                for (std::size_t i = n; i-- > 0;) {
                    if (dist2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        }
        if (pick == n) {  // all remaining weights are zero: take the first unchosen row
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        chosen.push_back(pick);
        is_chosen[pick] = 1;
        for (std::size_t i = 0; i < n; ++i)
            dist2[i] = std::min(dist2[i], squared_distance(work.row(i), work.row(pick)));
    }
    return chosen;
}

CentroidSet rows_as_centroids(const Dataset& data, const std::vector<std::size_t>& indices) {
    Matrix centers(indices.size(), data.dim());
    std::vector<int> sources;
    sources.reserve(indices.size());
    for (std::size_t c = 0; c < indices.size(); ++c) {
        const auto src = data.row(indices[c]);
        std::copy(src.begin(), src.end(), centers.row(c).begin());
        sources.push_back(static_cast<int>(indices[c]));
    }
    return {std::move(centers), std::move(sources)};
}

void check_k(int k, std::size_t n) {
    if (k < 2 || static_cast<std::size_t>(k) > n)
        throw DomainError("k must be in [2, " + std::to_string(n) + "], got " + std::to_string(k));
}

}  // namespace

std::string to_string(InitMethod init) {
    switch (init) {
        case InitMethod::Random: return "random";
        case InitMethod::PlusPlus: return "kmeans-pp";
        case InitMethod::Provided: return "provided";
    }
    return "?";
}

LabelVector assign(const Dataset& data, const CentroidSet& centers, MetricKind metric) {
    if (centers.k() == 0) throw DomainError("no centroids to assign to");
    if (centers.dim() != data.dim())
        throw DomainError("centroid dimension " + std::to_string(centers.dim()) +
                          " does not match data dimension " + std::to_string(data.dim()));
    if (metric == MetricKind::Euclidean)
        return assign_impl(data.features(), centers.centers, metric);
    return assign_impl(normalized_rows(data.features()), centers.centers, metric);
}

CentroidSet update_centroids(const Dataset& data, const LabelVector& labels, int k,
                             MetricKind metric) {
    if (labels.size() != data.size())
        throw InputError("label count " + std::to_string(labels.size()) +
                         " does not match point count " + std::to_string(data.size()));
    if (k < 1) throw DomainError("k must be positive");
    for (int c : labels)
        if (c < 0 || c >= k)
            throw InputError("label " + std::to_string(c) + " outside [0, " + std::to_string(k) + ")");
    return {update_impl(data.features(), labels, k, metric, true), std::nullopt};
}

CentroidSet random_init(const Dataset& data, int k, std::uint64_t seed) {
    check_k(k, data.size());
    return rows_as_centroids(data, random_indices(data.size(), static_cast<std::size_t>(k), seed));
}

CentroidSet kmeanspp_init(const Dataset& data, int k, std::uint64_t seed) {
    check_k(k, data.size());
    const bool cosine = data.metric() == MetricKind::Cosine;
    const Matrix* work = &data.features();
    Matrix storage;
    if (cosine) {
        storage = normalized_rows(data.features());
        work = &storage;
    }
    return rows_as_centroids(data, pp_indices(*work, static_cast<std::size_t>(k), seed));
}

ClusteringResult kmeans_run(const Dataset& data, const KMeansConfig& config) {
    const std::size_t n = data.size();
    check_k(config.k, n);
    if (config.max_iterations < 1)
        throw DomainError("max_iterations must be at least 1");
    if (config.convergence_tol < 0.0)
        throw DomainError("convergence_tol must be non-negative");

    const bool cosine = config.metric == MetricKind::Cosine;
    const std::size_t k = static_cast<std::size_t>(config.k);
    const Matrix* work = &data.features();
    Matrix storage;
    if (cosine) {
        storage = normalized_rows(data.features());
        work = &storage;
    }

    Matrix centers(k, data.dim());
    switch (config.init) {
        case InitMethod::Random:
        case InitMethod::PlusPlus: {
            const auto indices = config.init == InitMethod::Random
                                     ? random_indices(n, k, config.seed)
                                     : pp_indices(*work, k, config.seed);
            for (std::size_t c = 0; c < k; ++c) {
                const auto src = work->row(indices[c]);
                std::copy(src.begin(), src.end(), centers.row(c).begin());
            }
            break;
        }
        case InitMethod::Provided: {
            if (!config.provided_centroids)
                throw InputError("init is 'provided' but no centroids were given");
            const Matrix& given = config.provided_centroids->centers;
            if (given.rows() != k || given.cols() != data.dim())
                throw InputError("provided centroids are " + std::to_string(given.rows()) + "x" +
                                 std::to_string(given.cols()) + ", expected " + std::to_string(k) +
                                 "x" + std::to_string(data.dim()));
            centers = given;
            break;
        }
    }

    ClusteringResult result;
    LabelVector labels;
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        LabelVector next = assign_impl(*work, centers, config.metric);
        if (iter > 1 && next == labels) {
            result.converged = true;
            break;
        }
        labels = std::move(next);
        centers = update_impl(*work, labels, config.k, config.metric, config.normalize_centroids);
        result.sse_trace.push_back(trace_sse(*work, labels, centers, config.metric));
        if (config.convergence_tol > 0.0 && result.sse_trace.size() >= 2) {
            const double prev = result.sse_trace[result.sse_trace.size() - 2];
            const double cur = result.sse_trace.back();
            if (prev - cur <= config.convergence_tol * prev) {
                result.converged = true;
                break;
            }
        }
    }
    result.labels = std::move(labels);
    result.centroids = {std::move(centers), std::nullopt};
    result.iterations_run = static_cast<int>(result.sse_trace.size());
    return result;
}

}  // namespace discern
