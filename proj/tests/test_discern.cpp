#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "discern/discern.hpp"
#include "discern/io.hpp"
#include "discern/rng.hpp"
#include "oracles.hpp"
#include "reference_curves.hpp"

using namespace discern;

namespace {

std::vector<std::vector<double>> as_nested(const SimilarityMatrix& s) {
    std::vector<std::vector<double>> out(s.size(), std::vector<double>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j) out[i][j] = s(i, j);
    return out;
}

Dataset iris() {
    DatasetSpec spec;
    spec.features_path = std::string(DISCERN_DATA_DIR) + "/iris.csv";
    spec.has_header = true;
    spec.label_column = 4;
    spec.metric = MetricKind::Cosine;
    return load_dataset(spec);
}

// Three directions in the plane: 0,4 point +x; 2,5 point -x; 1,3 point +y.
const Matrix three_directions = Matrix::from_rows({{1.0, 0.0},
                                                   {0.0, 1.0},
                                                   {-1.0, 0.0},
                                                   {0.0, 2.0},
                                                   {3.0, 0.0},
                                                   {-2.0, 0.0}});

}  // namespace

TEST_CASE("seed picks the least similar pair and primes column stats") {
    const Dataset data(Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.1}}),
                       MetricKind::Cosine);
    const SimilarityMatrix s = build_similarity_matrix(data);
    const DiversityState st = DiversityState::seed(s);
    REQUIRE(st.selected == std::vector<int>{0, 2});
    CHECK(st.is_selected[0] == 1);
    CHECK(st.is_selected[1] == 0);
    CHECK(st.is_selected[2] == 1);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(st.col_max[j] == std::max(s(0, j), s(2, j)));
        CHECK(st.col_min[j] == std::min(s(0, j), s(2, j)));
    }
}

TEST_CASE("incremental column stats equal recomputation from scratch") {
    rng::Engine engine(31);
    const Dataset data(oracles::random_points(engine, 20, 5), MetricKind::Cosine);
    const SimilarityMatrix s = build_similarity_matrix(data);

    DiversityState st = DiversityState::seed(s);
    for (int step = 0; step < 10; ++step) {
        const auto [min_p, next] = st.evaluate();
        // Recompute every column stat directly from the selected set.
        for (std::size_t j = 0; j < s.size(); ++j) {
            double hi = -2.0, lo = 2.0;
            for (int sel : st.selected) {
                hi = std::max(hi, s(static_cast<std::size_t>(sel), j));
                lo = std::min(lo, s(static_cast<std::size_t>(sel), j));
            }
            REQUIRE(st.col_max[j] == hi);
            REQUIRE(st.col_min[j] == lo);
            if (!st.is_selected[j]) REQUIRE(st.p[j] == hi * hi * lo * (hi - lo));
        }
        REQUIRE(min_p == *std::min_element(st.p.begin(), st.p.end()));
        st.add(s, next);
    }
}

TEST_CASE("diversity scan on three directions: ties, order, objective trace") {
    const SimilarityMatrix s =
        build_similarity_matrix(Dataset(three_directions, MetricKind::Cosine));
    const DiversityScan scan = diversity_scan(s, 6);
    // (0,2) is the lexicographically first opposite pair; the +x/-x columns
    // tie at p = -2 and resolve to the smaller index each time; the +y
    // columns tie at p = 0 last.
    CHECK(scan.order == std::vector<int>{0, 2, 4, 5, 1, 3});
    REQUIRE(scan.r_values.size() == 6);
    CHECK(scan.r_values[0] == 0.0);
    CHECK(scan.r_values[1] == 0.0);
    CHECK(scan.r_values[2] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(scan.r_values[3] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(scan.r_values[4] == doctest::Approx(0.0));
    CHECK(scan.r_values[5] == doctest::Approx(0.0));
}

TEST_CASE("diversity scan matches the literal sub-matrix oracle") {
    rng::Engine engine(555);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 3 + rng::uniform_index(engine, 22);
        const std::size_t d = 1 + rng::uniform_index(engine, 6);
        const Dataset data(oracles::random_points(engine, n, d), MetricKind::Cosine);
        const SimilarityMatrix s = build_similarity_matrix(data);
        const int l_max = static_cast<int>(2 + rng::uniform_index(engine, n - 1));

        const DiversityScan got = diversity_scan(s, l_max);
        const oracles::DiversityTrace expect = oracles::diversity_scan(as_nested(s), l_max);
        REQUIRE(got.order == expect.order);
        REQUIRE(got.r_values.size() == expect.r_values.size());
        for (std::size_t j = 0; j < got.r_values.size(); ++j)
            REQUIRE(got.r_values[j] == expect.r_values[j]);
    }
}

TEST_CASE("longer scans extend shorter ones") {
    rng::Engine engine(77);
    const Dataset data(oracles::random_points(engine, 18, 4), MetricKind::Cosine);
    const SimilarityMatrix s = build_similarity_matrix(data);
    const DiversityScan full = diversity_scan(s, 18);
    for (int l : {2, 5, 11}) {
        const DiversityScan part = diversity_scan(s, l);
        REQUIRE(std::equal(part.order.begin(), part.order.end(), full.order.begin()));
        REQUIRE(std::equal(part.r_values.begin(), part.r_values.end(), full.r_values.begin()));
    }
}

TEST_CASE("diversity scan rejects bad sweep lengths") {
    const SimilarityMatrix s =
        build_similarity_matrix(Dataset(three_directions, MetricKind::Cosine));
    CHECK_THROWS_AS(diversity_scan(s, 1), DomainError);
    CHECK_THROWS_AS(diversity_scan(s, 7), DomainError);
    CHECK_NOTHROW(diversity_scan(s, 2));
}

TEST_CASE("signed curvature of a parabola trace") {
    const std::vector<double> r{0.0, 1.0, 4.0, 9.0, 16.0, 25.0};
    const std::vector<double> expect{0.35355339059327373, 0.13416407864998736,
                                     0.02853360294545094, 0.00888643174623553,
                                     0.0028623400289817334, 0.001346725927742031};
    const std::vector<double> kappa = signed_curvature(r);
    REQUIRE(kappa.size() == expect.size());
    for (std::size_t i = 0; i < kappa.size(); ++i)
        CHECK(kappa[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("signed curvature dips where an increasing trace flattens") {
    const std::vector<double> r{0.0, 0.0, 1.0, 2.0, 3.0, 3.2, 3.3, 3.35, 3.37};
    const std::vector<double> kappa = signed_curvature(r);
    CHECK(kappa[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(kappa[4] == doctest::Approx(-0.26796653928517006).epsilon(1e-12));
    CHECK(estimate_k(kappa, 0, static_cast<int>(kappa.size()) - 1) == 4);
    CHECK(estimate_k(kappa, 3, static_cast<int>(kappa.size()) - 2) == 4);
}

TEST_CASE("curvature of a straight line is zero") {
    const std::vector<double> r{1.0, 3.0, 5.0, 7.0, 9.0};
    for (double k : signed_curvature(r)) CHECK(k == doctest::Approx(0.0));
}

TEST_CASE("signed curvature needs at least 4 samples") {
    CHECK_THROWS_AS(signed_curvature(std::vector<double>{1.0, 2.0, 3.0}), DomainError);
    CHECK_NOTHROW(signed_curvature(std::vector<double>{1.0, 2.0, 3.0, 4.0}));
}

TEST_CASE("estimate_k argmin, ties and ranges") {
    const std::vector<double> kappa{5.0, 1.0, 1.0, 1.0, 5.0, -9.0};
    CHECK(estimate_k(kappa, 1, 3) == 1);             // tie -> smallest index
    CHECK(estimate_k(kappa, 2, 3) == 2);
    CHECK(estimate_k(kappa, 0, 5) == 5);
    CHECK(estimate_k(kappa) == 2);                   // default window [2, n-2]
    CHECK(estimate_k(kappa, 1) == 1);
    CHECK_THROWS_AS(estimate_k(kappa, 4, 2), DomainError);
    CHECK_THROWS_AS(estimate_k(kappa, -1, 3), DomainError);
    CHECK_THROWS_AS(estimate_k(std::vector<double>{1.0, 2.0}), DomainError);
}

TEST_CASE("published selection traces reproduce the published curvature") {
    struct Row {
        const std::vector<double>& r;
        const std::vector<double>& kappa;
        int expected_k;
        double tol;
    };
    const std::vector<Row> rows{
        {refcurves::iris_r, refcurves::iris_kappa, 3, 1e-4},
        {refcurves::wine_r, refcurves::wine_kappa, 3, 1e-9},
        {refcurves::fei_r, refcurves::fei_kappa, 201, 1e-6},
    };
    for (const Row& row : rows) {
        const std::vector<double> kappa = signed_curvature(row.r);
        REQUIRE(kappa.size() == row.kappa.size());
        for (std::size_t i = 0; i < kappa.size(); ++i)
            REQUIRE(std::abs(kappa[i] - row.kappa[i]) <= row.tol);
        const int n = static_cast<int>(kappa.size());
        CHECK(estimate_k(kappa, 3, n - 2) == row.expected_k);
    }

    // The early iris samples agree to full reporting precision.
    const std::vector<double> iris_kappa = signed_curvature(refcurves::iris_r);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(std::abs(iris_kappa[i] - refcurves::iris_kappa[i]) <= 1e-6);
}

TEST_CASE("discern_init with fixed k returns that many data rows") {
    const Dataset data(three_directions, MetricKind::Cosine);
    const DiscernResult res = discern_init(data, {.fixed_k = 4, .k_max = std::nullopt});
    REQUIRE(res.centroid_indices.size() == 4);
    CHECK(res.centroid_indices == std::vector<int>{0, 2, 4, 5});
    CHECK(res.curve.estimated_k == 4);
    REQUIRE(res.centroids.k() == 4);
    REQUIRE(res.centroids.source_indices.has_value());
    CHECK(*res.centroids.source_indices == res.centroid_indices);
    for (std::size_t c = 0; c < 4; ++c) {
        const auto src = data.row(static_cast<std::size_t>(res.centroid_indices[c]));
        const auto got = res.centroids.centers.row(c);
        for (std::size_t j = 0; j < data.dim(); ++j) REQUIRE(got[j] == src[j]);
    }
    CHECK(res.curve.r_values.size() == 4);
    CHECK(res.curve.kappa.size() == 4);  // enough samples to differentiate

    const DiscernResult tiny = discern_init(data, {.fixed_k = 2, .k_max = std::nullopt});
    CHECK(tiny.curve.kappa.empty());  // too short for curvature
    CHECK(tiny.centroid_indices == std::vector<int>{0, 2});
}

TEST_CASE("discern_init validates its options") {
    const Dataset data(three_directions, MetricKind::Cosine);
    CHECK_THROWS_AS(discern_init(data, {.fixed_k = 1, .k_max = std::nullopt}), DomainError);
    CHECK_THROWS_AS(discern_init(data, {.fixed_k = 7, .k_max = std::nullopt}), DomainError);
    CHECK_THROWS_AS(discern_init(data, {.fixed_k = 3, .k_max = 5}), InputError);
    CHECK_THROWS_AS(discern_init(data, {.fixed_k = std::nullopt, .k_max = 4}), DomainError);
    CHECK_NOTHROW(discern_init(data, {.fixed_k = std::nullopt, .k_max = 5}));
}

TEST_CASE("estimating on a too-small dataset is refused") {
    const Dataset data(Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}}),
                       MetricKind::Cosine);
    CHECK_THROWS_AS(discern_init(data), DomainError);
    CHECK_NOTHROW(discern_init(data, {.fixed_k = 3, .k_max = std::nullopt}));
}

TEST_CASE("discern_init estimates K = 3 on iris") {
    const Dataset data = iris();
    const DiscernResult res = discern_init(data);
    CHECK(res.curve.estimated_k == 3);
    CHECK(res.centroid_indices.size() == 3);
    CHECK(res.curve.r_values.size() == data.size());
    CHECK(res.curve.kappa.size() == data.size());

    // Deterministic: a second run is identical.
    const DiscernResult again = discern_init(data);
    CHECK(again.centroid_indices == res.centroid_indices);
    CHECK(again.centroids.centers == res.centroids.centers);
    CHECK(again.curve.r_values == res.curve.r_values);
    CHECK(again.curve.kappa == res.curve.kappa);
}

TEST_CASE("row order does not change which points discern_init selects") {
    rng::Engine engine(99);
    const std::size_t n = 25;
    const Matrix m = oracles::random_points(engine, n, 4);
    const DiscernResult base = discern_init(Dataset(m, MetricKind::Cosine), {.fixed_k = 5, .k_max = std::nullopt});

    // Rotate rows by 7 and map expectations through the permutation.
    Matrix rotated(n, 4);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 4; ++j) rotated((i + 7) % n, j) = m(i, j);
    const DiscernResult moved =
        discern_init(Dataset(rotated, MetricKind::Cosine), {.fixed_k = 5, .k_max = std::nullopt});

    // The same physical points should be chosen. Only the internal order of
    // the seed pair depends on row indices (the pair comes back sorted by
    // index), so compare as sets.
    std::vector<std::vector<double>> base_rows, moved_rows;
    for (int idx : base.centroid_indices) {
        const auto r = m.row(static_cast<std::size_t>(idx));
        base_rows.emplace_back(r.begin(), r.end());
    }
    for (int idx : moved.centroid_indices) {
        const auto r = rotated.row(static_cast<std::size_t>(idx));
        moved_rows.emplace_back(r.begin(), r.end());
    }
    std::sort(base_rows.begin(), base_rows.end());
    std::sort(moved_rows.begin(), moved_rows.end());
    CHECK(base_rows == moved_rows);
    CHECK(std::equal(base.curve.r_values.begin(), base.curve.r_values.end(),
                     moved.curve.r_values.begin()));
}
