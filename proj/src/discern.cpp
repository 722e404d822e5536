#include "discern/discern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace discern {

DiversityState DiversityState::seed(const SimilarityMatrix& s) {
    const std::size_t n = s.size();
    const auto [a, b] = min_similarity_pair(s);

    DiversityState st;
    st.is_selected.assign(n, 0);
    st.col_max.resize(n);
    st.col_min.resize(n);
    st.p.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < n; ++j) {
        st.col_max[j] = std::max(s(a, j), s(b, j));
        st.col_min[j] = std::min(s(a, j), s(b, j));
    }
    st.selected = {static_cast<int>(a), static_cast<int>(b)};
    st.is_selected[a] = 1;
    st.is_selected[b] = 1;
    return st;
}

std::pair<double, int> DiversityState::evaluate() {
    const std::size_t n = p.size();
    double best = std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (std::size_t j = 0; j < n; ++j) {
        if (is_selected[j]) {
            p[j] = std::numeric_limits<double>::infinity();
            continue;
        }
        const double hi = col_max[j];
        const double lo = col_min[j];
        p[j] = hi * hi * lo * (hi - lo);
        if (p[j] < best) {  // strict: ties keep the smallest index
            best = p[j];
            best_j = static_cast<int>(j);
        }
    }
    if (best_j < 0) throw DomainError("no unselected points left to evaluate");
    return {best, best_j};
}

void DiversityState::add(const SimilarityMatrix& s, int index) {
    const auto row = s.row(static_cast<std::size_t>(index));
    for (std::size_t j = 0; j < col_max.size(); ++j) {
        col_max[j] = std::max(col_max[j], row[j]);
        col_min[j] = std::min(col_min[j], row[j]);
    }
    selected.push_back(index);
    is_selected[static_cast<std::size_t>(index)] = 1;
}

DiversityScan diversity_scan(const SimilarityMatrix& s, int l_max) {
    const std::size_t n = s.size();
    if (l_max < 2 || static_cast<std::size_t>(l_max) > n)
        throw DomainError("l_max must be in [2, " + std::to_string(n) + "], got " +
                          std::to_string(l_max));

    DiversityState state = DiversityState::seed(s);
    DiversityScan scan;
    scan.r_values.assign(static_cast<std::size_t>(l_max), 0.0);
    for (int j = 2; j < l_max; ++j) {
        const auto [min_p, next] = state.evaluate();
        scan.r_values[static_cast<std::size_t>(j)] = min_p;
        state.add(s, next);
    }
    scan.order = std::move(state.selected);
    return scan;
}

namespace {

std::vector<double> gradient(std::span<const double> a) {
    const std::size_t n = a.size();
    std::vector<double> g(n);
    g.front() = a[1] - a[0];
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (a[i + 1] - a[i - 1]) / 2.0;
    g.back() = a[n - 1] - a[n - 2];
    return g;
}

}  // namespace

std::vector<double> signed_curvature(std::span<const double> r_values) {
    const std::size_t n = r_values.size();
    if (n < 4)
        throw DomainError("curvature needs at least 4 samples, got " + std::to_string(n));
    const std::vector<double> d1 = gradient(r_values);
    const std::vector<double> d2 = gradient(d1);
    std::vector<double> kappa(n);
    for (std::size_t i = 0; i < n; ++i)
        kappa[i] = d2[i] / std::pow(1.0 + d1[i] * d1[i], 1.5);
    return kappa;
}

int estimate_k(std::span<const double> kappa, int k_min, std::optional<int> k_max) {
    const int n = static_cast<int>(kappa.size());
    if (n < 4) throw DomainError("need at least 4 curvature samples, got " + std::to_string(n));
    const int lo = k_min;
    const int hi = std::min(k_max.value_or(n - 2), n - 1);
    if (lo < 0 || lo > hi)
        throw DomainError("empty search range [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    int best = lo;
    for (int i = lo + 1; i <= hi; ++i)
        if (kappa[static_cast<std::size_t>(i)] < kappa[static_cast<std::size_t>(best)]) best = i;
    return best;
}

DiscernResult discern_init(const Dataset& data, const DiscernOptions& options) {
    if (options.fixed_k && options.k_max)
        throw InputError("fixed_k and k_max are mutually exclusive");

    const int n = static_cast<int>(data.size());
    const SimilarityMatrix s = build_similarity_matrix(data);

    DiscernResult result;
    if (options.fixed_k) {
        const int k = *options.fixed_k;
        if (k < 2 || k > n)
            throw DomainError("k must be in [2, " + std::to_string(n) + "], got " +
                              std::to_string(k));
        DiversityScan scan = diversity_scan(s, k);
        result.curve.r_values = scan.r_values;
        if (scan.r_values.size() >= 4)
            result.curve.kappa = signed_curvature(scan.r_values);
        result.curve.estimated_k = k;
        result.centroid_indices = std::move(scan.order);
    } else {
        const int l_max = std::min(options.k_max.value_or(n), n);
        if (l_max < 5)
            throw DomainError("estimating K needs a sweep of at least 5 steps, got " +
                              std::to_string(l_max));
        DiversityScan scan = diversity_scan(s, l_max);
        result.curve.r_values = scan.r_values;
        result.curve.kappa = signed_curvature(result.curve.r_values);
        result.curve.estimated_k = estimate_k(result.curve.kappa, 3, l_max - 2);
        scan.order.resize(static_cast<std::size_t>(result.curve.estimated_k));
        result.centroid_indices = std::move(scan.order);
    }

    const std::size_t k = result.centroid_indices.size();
    Matrix centers(k, data.dim());
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = data.row(static_cast<std::size_t>(result.centroid_indices[c]));
        std::copy(src.begin(), src.end(), centers.row(c).begin());
    }
    result.centroids = {std::move(centers), result.centroid_indices};
    return result;
}

}  // namespace discern
