#include <doctest.h>

#include <cmath>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/numeric.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/stats.hpp"

using namespace rmtlab;

TEST_CASE("unfold: classical locations give unit gaps in the bulk") {
    const int n = 1000;
    auto g = classical_locations_sc(n);
    Eigen::VectorXd ev = Eigen::Map<Eigen::VectorXd>(g.data(), n);
    auto law = EquilibriumLaw::semicircle();
    auto gaps = unfold(ev, n, law, 0.0, 0.5);
    CHECK(gaps.gaps.size() > 100);
    for (double s : gaps.gaps) CHECK(s == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("unfold: GOE bulk mean gap is 1 within 3 percent") {
    auto law = EquilibriumLaw::semicircle();
    std::vector<double> pool;
    for (int t = 0; t < 3; ++t) {
        RngStream rng = seed_stream(51, t, "unfold");
        auto h = sample_wigner(EnsembleSpec::goe(1000), rng);
        auto sp = eigen_decompose(h, false);
        auto g = unfold(sp, law, 0.0, 0.5);
        pool.insert(pool.end(), g.gaps.begin(), g.gaps.end());
    }
    CHECK(mean(pool) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("unfold rejects windows outside the bulk") {
    auto law = EquilibriumLaw::semicircle();
    Eigen::VectorXd ev(3);
    ev << -0.5, 0.0, 0.5;
    CHECK_THROWS(unfold(ev, 3, law, 2.5, 0.3));
    CHECK_THROWS(unfold(ev, 3, law, 1.9, 0.3)); // touches the edge margin
}

TEST_CASE("unfold is invariant under joint dilation of spectrum and law") {
    const int n = 500;
    RngStream rng = seed_stream(52, 0, "scale");
    auto h = sample_wigner(EnsembleSpec::goe(n), rng);
    auto sp = eigen_decompose(h, false);
    auto base = unfold(sp.eigenvalues, n, EquilibriumLaw::semicircle(), 0.0, 0.5);
    double c = 2.5;
    Eigen::VectorXd scaled = sp.eigenvalues * c;
    auto law_scaled = EquilibriumLaw::semicircle_scaled(c);
    auto after = unfold(scaled, n, law_scaled, 0.0, c * 0.5);
    REQUIRE(base.gaps.size() == after.gaps.size());
    for (size_t k = 0; k < base.gaps.size(); ++k)
        CHECK(base.gaps[k] == doctest::Approx(after.gaps[k]).epsilon(1e-9));
}

TEST_CASE("gap histogram normalization and input guards") {
    RngStream rng = seed_stream(53, 0, "hist");
    std::vector<double> gaps;
    for (int i = 0; i < 2000; ++i) gaps.push_back(-std::log(rng.uniform()));
    auto h = gap_histogram(gaps, 25, 8.0);
    double total = 0;
    for (size_t b = 0; b < h.density.size(); ++b)
        total += h.density[b] * (h.edges[b + 1] - h.edges[b]);
    // mass beyond the last edge is excluded by construction
    double tail = 0;
    for (double g : gaps) tail += (g >= 8.0);
    CHECK(std::abs(total - (1.0 - tail / gaps.size())) < 1e-8);
    std::vector<double> few(100, 1.0);
    CHECK_THROWS(gap_histogram(few, 10, 5.0));
}

TEST_CASE("wigner surmise: normalization, mean one, repulsion at zero") {
    CHECK(wigner_surmise_pdf(0.0) == 0.0);
    CHECK_THROWS(wigner_surmise_pdf(-0.1));
    double z0 = integrate([](double s) { return wigner_surmise_pdf(s); }, 0.0, 12.0, 256);
    double z1 = integrate([](double s) { return s * wigner_surmise_pdf(s); }, 0.0, 12.0, 256);
    CHECK(std::abs(z0 - 1.0) < 1e-10);
    CHECK(std::abs(z1 - 1.0) < 1e-10);
}

TEST_CASE("ks_distance: exact edge cases and null behavior") {
    std::vector<double> a{1, 2, 3, 4};
    CHECK(ks_distance(a, a) == 0.0);
    std::vector<double> b{10, 11, 12};
    CHECK(ks_distance(a, b) == 1.0);
    CHECK_THROWS(ks_distance({}, a));

    int below = 0;
    const int seeds = 40;
    for (int t = 0; t < seeds; ++t) {
        RngStream rng = seed_stream(54, t, "ksnull");
        std::vector<double> x(10000), y(10000);
        for (auto& v : x) v = rng.uniform();
        for (auto& v : y) v = rng.uniform();
        if (ks_distance(x, y) < 0.03) ++below;
    }
    CHECK(below >= 38); // 95 percent of seeds
}

TEST_CASE("ks_distance is symmetric and satisfies the triangle inequality") {
    RngStream rng = seed_stream(55, 0, "kstri");
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a(60), b(80), c(50);
        for (auto& v : a) v = rng.gaussian();
        for (auto& v : b) v = rng.gaussian() + rng.uniform();
        for (auto& v : c) v = 2.0 * rng.uniform() - 1.0;
        double ab = ks_distance(a, b), ba = ks_distance(b, a);
        double bc = ks_distance(b, c), ac = ks_distance(a, c);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("one-sample KS against a CDF") {
    RngStream rng = seed_stream(56, 0, "ks1");
    std::vector<double> x(20000);
    for (auto& v : x) v = rng.uniform();
    CHECK(ks_distance_cdf(x, [](double t) { return std::min(std::max(t, 0.0), 1.0); }) < 0.015);
}

TEST_CASE("edge statistic: centering and shift equivariance") {
    Eigen::VectorXd ev(4);
    ev << -1.0, 0.0, 1.0, 2.0;
    auto s = edge_statistic({ev}, EdgeWhich::largest);
    CHECK(s.values[0] == 0.0);
    double delta = 0.37;
    Eigen::VectorXd shifted = ev.array() + delta;
    auto s2 = edge_statistic({shifted}, EdgeWhich::largest);
    double n23 = std::pow(4.0, 2.0 / 3.0);
    CHECK(s2.values[0] == doctest::Approx(n23 * delta).epsilon(1e-12));
    auto s3 = edge_statistic({ev}, EdgeWhich::second_largest);
    CHECK(s3.values[0] == doctest::Approx(n23 * (1.0 - 2.0)));
}

TEST_CASE("two-point estimator reads about 1 for iid input") {
    const int n = 500, samples = 60;
    auto law = EquilibriumLaw::semicircle();
    std::vector<Eigen::VectorXd> pts(samples);
    for (int s = 0; s < samples; ++s) {
        RngStream rng = seed_stream(57, s, "tp-poisson");
        std::vector<double> x(n);
        for (auto& v : x) v = law.quantile(rng.uniform());
        std::sort(x.begin(), x.end());
        pts[s] = Eigen::Map<Eigen::VectorXd>(x.data(), n);
    }
    auto corr = two_point_window_correlation(pts, n, law, 0.0, 0.5);
    for (size_t b = 4; b < corr.value.size(); ++b)
        CHECK(corr.value[b] == doctest::Approx(1.0).epsilon(0.15));
}
