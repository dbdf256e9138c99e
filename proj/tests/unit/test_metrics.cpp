#include <doctest.h>

#include <cmath>

#include "clusterlab/error.hpp"
#include "clusterlab/metrics.hpp"
#include "clusterlab/rng.hpp"
#include "support/oracles.hpp"
#include "support/random_data.hpp"

using namespace clab;
using metrics::NoiseMode;

namespace {

Matrix points(std::initializer_list<std::pair<double, double>> xy) {
    Matrix m(xy.size(), 2);
    std::size_t i = 0;
    for (auto [a, b] : xy) {
        m(i, 0) = a;
        m(i, 1) = b;
        ++i;
    }
    return m;
}

std::vector<int> random_labels(Rng& rng, std::size_t n, std::uint64_t k, bool noise = false) {
    std::vector<int> l(n);
    for (auto& v : l) v = static_cast<int>(rng.below(k)) - (noise ? 1 : 0);
    return l;
}

}  // namespace

TEST_CASE("ari: reference values") {
    const std::vector<int> t{0, 0, 0, 1, 1, 1}, p{0, 0, 1, 1, 1, 1};
    CHECK(metrics::ari(t, p) == doctest::Approx(0.324324324324324).epsilon(1e-12));
    CHECK(metrics::ari(t, t) == 1.0);
    CHECK(metrics::ari(t, std::vector<int>{5, 5, 5, 9, 9, 9}) == 1.0);
    CHECK(metrics::ari(t, std::vector<int>(6, 0)) == 0.0);
    CHECK(metrics::ari(std::vector<int>(4, 1), std::vector<int>(4, 2)) == 1.0);
    CHECK_THROWS_AS(metrics::ari(t, std::vector<int>{0, 1}), Error);
}

TEST_CASE("nmi: reference values") {
    const std::vector<int> t{0, 0, 0, 1, 1, 1}, p{0, 0, 1, 1, 1, 1};
    CHECK(metrics::nmi(t, p) == doctest::Approx(0.478703971385680).epsilon(1e-12));
    CHECK(metrics::nmi(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1}) == doctest::Approx(0.0));
    CHECK(metrics::nmi(t, t) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(metrics::nmi(std::vector<int>(3, 0), std::vector<int>(3, 4)) == 1.0);
    CHECK(metrics::nmi(t, std::vector<int>(6, 0)) == 0.0);
}

TEST_CASE("noise modes") {
    const std::vector<int> t{0, 0, 1, 1, 1}, p{0, 0, 1, 1, kNoise};
    CHECK(metrics::ari(t, p, NoiseMode::exclude) == 1.0);
    CHECK(metrics::ari(t, p, NoiseMode::as_cluster) < 1.0);
    CHECK(metrics::parse_noise_mode("exclude") == NoiseMode::exclude);
    CHECK_FALSE(metrics::parse_noise_mode("drop").has_value());
}

TEST_CASE("external metrics agree with pair counting and are symmetric") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(120);
        auto u = random_labels(rng, n, 1 + rng.below(6));
        auto v = random_labels(rng, n, 1 + rng.below(6));
        CHECK(metrics::ari(u, v) == doctest::Approx(oracle::ari(u, v)).epsilon(1e-10));
        CHECK(metrics::nmi(u, v) == doctest::Approx(oracle::nmi(u, v)).epsilon(1e-10));
        CHECK(metrics::ari(u, v) == doctest::Approx(metrics::ari(v, u)).epsilon(1e-12));
        CHECK(metrics::nmi(u, v) == doctest::Approx(metrics::nmi(v, u)).epsilon(1e-12));
    }
}

TEST_CASE("silhouette: two tight far blobs") {
    Matrix x(10, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        x(i, 0) = 0.1 * static_cast<double>(i);
        x(i + 5, 0) = 100.0 + 0.1 * static_cast<double>(i);
    }
    const std::vector<int> l{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(*metrics::silhouette(x, l) == doctest::Approx(0.997999995299985).epsilon(1e-12));
    const std::vector<int> swapped{0, 0, 0, 1, 1, 1, 1, 1, 0, 0};
    CHECK(*metrics::silhouette(x, swapped) < 0.0);
    CHECK_FALSE(metrics::silhouette(x, std::vector<int>(10, 0)).has_value());
}

TEST_CASE("silhouette: equidistant point and singleton") {
    auto x = points({{0, 0}, {1, 0}, {-1, 0}});
    // Point 0: a = b = 1 gives 0. Point 1: a = 1, b = 2. Point 2 is a singleton.
    CHECK(*metrics::silhouette(x, std::vector<int>{0, 0, 1}) == doctest::Approx(0.5 / 3.0).epsilon(1e-15));
}

TEST_CASE("davies_bouldin: symmetric fixture, scaling and spread") {
    auto x = points({{0, 0}, {1, 0}, {-1, 0}, {10, 0}, {11, 0}, {9, 0}});
    const std::vector<int> l{0, 0, 0, 1, 1, 1};
    CHECK(metrics::davies_bouldin(x, l) == doctest::Approx(0.133333333333333).epsilon(1e-12));
    Matrix scaled = x;
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled.data()[i] *= 7.5;
    CHECK(metrics::davies_bouldin(scaled, l) == doctest::Approx(metrics::davies_bouldin(x, l)).epsilon(1e-9));
    auto tighter = points({{0, 0}, {0.5, 0}, {-0.5, 0}, {10, 0}, {11, 0}, {9, 0}});
    CHECK(metrics::davies_bouldin(tighter, l) < metrics::davies_bouldin(x, l));
    auto same = points({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
    try {
        metrics::davies_bouldin(same, std::vector<int>{0, 0, 1, 1});
        FAIL("expected NumericalFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NumericalFailure);
        CHECK(std::string(e.what()).find("0 and 1") != std::string::npos);
    }
}

TEST_CASE("calinski_harabasz: hand fixture and degenerate spread") {
    auto x = points({{0, 0}, {0, 2}, {4, 0}, {4, 2}});
    CHECK(metrics::calinski_harabasz(x, std::vector<int>{0, 0, 1, 1}) == doctest::Approx(8.0).epsilon(1e-14));
    auto dup = points({{0, 0}, {0, 0}, {3, 3}, {3, 3}});
    CHECK(std::isinf(metrics::calinski_harabasz(dup, std::vector<int>{0, 0, 1, 1})));
    CHECK_THROWS_AS(metrics::calinski_harabasz(x, std::vector<int>{0, 1, 2, 3}), Error);
}

TEST_CASE("internal metrics agree with direct definitions, with noise") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 10 + rng.below(150);
        auto x = testing::random_matrix(n, 1 + rng.below(5), 1000 + trial);
        auto l = random_labels(rng, n, 2 + rng.below(4), trial % 2 == 0);
        // Need two clusters present.
        l[0] = 0;
        l[1] = 1;
        CHECK(*metrics::silhouette(x, l) == doctest::Approx(*oracle::silhouette(x, l)).epsilon(1e-10));
        CHECK(metrics::davies_bouldin(x, l) == doctest::Approx(oracle::davies_bouldin(x, l)).epsilon(1e-10));
        CHECK(metrics::calinski_harabasz(x, l) == doctest::Approx(oracle::calinski_harabasz(x, l)).epsilon(1e-10));
    }
}

TEST_CASE("internal metrics are invariant to rotation and translation") {
    auto x = testing::random_matrix(60, 2, 5);
    Rng rng(2);
    auto l = random_labels(rng, 60, 3);
    const double th = 0.7;
    Matrix y(60, 2);
    for (std::size_t i = 0; i < 60; ++i) {
        y(i, 0) = std::cos(th) * x(i, 0) - std::sin(th) * x(i, 1) + 3.0;
        y(i, 1) = std::sin(th) * x(i, 0) + std::cos(th) * x(i, 1) - 8.0;
    }
    CHECK(*metrics::silhouette(y, l) == doctest::Approx(*metrics::silhouette(x, l)).epsilon(1e-9));
    CHECK(metrics::davies_bouldin(y, l) == doctest::Approx(metrics::davies_bouldin(x, l)).epsilon(1e-9));
    CHECK(metrics::calinski_harabasz(y, l) == doctest::Approx(metrics::calinski_harabasz(x, l)).epsilon(1e-9));
}

TEST_CASE("stability score") {
    const std::vector<double> same{0.7, 0.7, 0.7};
    auto r = metrics::stability(same);
    CHECK(r.std == 0.0);
    CHECK(*r.score == 1.0);
    const std::vector<double> two{0.477, 0.511};  // mean 0.494, std 0.017
    CHECK(*metrics::stability(two).score == doctest::Approx(1.0 - 0.017 / 0.494).epsilon(1e-12));
    CHECK_FALSE(metrics::stability(std::vector<double>{-0.1, 0.05}).score.has_value());
    CHECK_THROWS_AS(metrics::stability(std::vector<double>{0.5}), Error);
}

TEST_CASE("make_labeling keeps noise and numbers clusters by first appearance") {
    auto l = make_labeling(std::vector<int>{7, kNoise, 3, 7});
    CHECK(l.assignments == std::vector<int>{0, kNoise, 1, 0});
    CHECK(l.n_clusters == 2);
    CHECK(l.n_noise() == 1);
}
