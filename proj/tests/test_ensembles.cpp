#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/stats.hpp"

using namespace rmtlab;

TEST_CASE("three-point law: atoms and exact moments in rational arithmetic") {
    auto d = make_moment_matched_three_point();
    REQUIRE(d.atoms.size() == 3);
    CHECK(d.atoms[0].first == doctest::Approx(-std::sqrt(3.0)));
    CHECK(d.atoms[1].first == 0.0);
    CHECK(d.atoms[2].first == doctest::Approx(std::sqrt(3.0)));
    CHECK(d.atoms[0].second == doctest::Approx(1.0 / 6.0));
    CHECK(d.atoms[1].second == doctest::Approx(2.0 / 3.0));

    // Probabilities are sixths and the atom values square to exactly 3, so
    // the moment system is checkable in integers: with weights (1, 4, 1)/6,
    // m2 = (1*3 + 4*0 + 1*3)/6 and m4 = (1*9 + 4*0 + 1*9)/6.
    std::int64_t w[3] = {1, 4, 1};
    std::int64_t x2[3] = {3, 0, 3};
    std::int64_t m2_num = 0, m4_num = 0, m1_num = 0, m3_num = 0;
    for (int k = 0; k < 3; ++k) {
        m2_num += w[k] * x2[k];
        m4_num += w[k] * x2[k] * x2[k];
    }
    // odd moments vanish by the symmetry of the atom set
    m1_num = w[0] * -1 + w[2] * 1;
    m3_num = w[0] * -1 + w[2] * 1;
    CHECK(m1_num == 0);
    CHECK(m3_num == 0);
    CHECK(m2_num == 6);       // = 1 * 6
    CHECK(m4_num == 18);      // = 3 * 6
    CHECK(d.moments[1] == 1.0);
    CHECK(d.moments[3] == 3.0);
    double psum = 0;
    for (auto& [v, p] : d.atoms) psum += p;
    CHECK(std::abs(psum - 1.0) < 1e-12);
}

TEST_CASE("custom discrete law validation") {
    CHECK_THROWS(EntryDistribution::custom_discrete({{1.0, 0.6}, {-1.0, 0.5}}));
    CHECK_THROWS(EntryDistribution::custom_discrete({{2.0, 0.5}, {-2.0, 0.5}})); // m2 != 1
    auto ok = EntryDistribution::custom_discrete({{1.0, 0.5}, {-1.0, 0.5}});
    CHECK(ok.moments[3] == doctest::Approx(1.0));
}

TEST_CASE("hermiticity is bit-exact") {
    RngStream rng = seed_stream(31, 0, "herm");
    auto hr = sample_wigner(EnsembleSpec::goe(40), rng);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) CHECK(hr.real(i, j) == hr.real(j, i));
    auto hc = sample_wigner(EnsembleSpec::gue(40), rng);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) {
            CHECK(hc.cplx(i, j).real() == hc.cplx(j, i).real());
            CHECK(hc.cplx(i, j).imag() == -hc.cplx(j, i).imag());
        }
}

TEST_CASE("N=1 flat profile is a unit-variance real Gaussian") {
    double s2 = 0;
    const int m = 4000;
    for (int t = 0; t < m; ++t) {
        RngStream rng = seed_stream(32, t, "n1");
        auto h = sample_wigner(EnsembleSpec::goe(1), rng);
        s2 += h.real(0, 0) * h.real(0, 0);
    }
    CHECK(s2 / m == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("bernoulli off-diagonals take exactly two values") {
    RngStream rng = seed_stream(33, 0, "ber");
    int n = 50;
    auto h = sample_wigner(
        EnsembleSpec::wigner(n, Symmetry::real_symmetric, EntryDistribution::bernoulli_symmetric()),
        rng);
    double v = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            CHECK((h.real(i, j) == v || h.real(i, j) == -v));
}

TEST_CASE("complex entries: E h^2 = 0 and E |h|^2 = 1/N") {
    const int n = 24, m = 4000;
    std::complex<double> sum_sq(0, 0);
    double sum_abs2 = 0, sum_re_im = 0;
    for (int t = 0; t < m; ++t) {
        RngStream rng = seed_stream(34, t, "cplx");
        auto h = sample_wigner(EnsembleSpec::gue(n), rng);
        auto v = h.cplx(1, 3);
        sum_sq += v * v;
        sum_abs2 += std::norm(v);
        sum_re_im += v.real() * v.imag();
    }
    double se = 1.0 / n / std::sqrt(static_cast<double>(m));
    CHECK(std::abs(sum_sq / static_cast<double>(m)) < 5 * se);
    CHECK(sum_abs2 / m == doctest::Approx(1.0 / n).epsilon(0.1));
    CHECK(std::abs(sum_re_im / m) < 5 * se);
}

TEST_CASE("complex second moment override: E h^2 = c / N") {
    const int n = 24, m = 6000;
    EnsembleSpec spec = EnsembleSpec::gue(n);
    spec.complex_second_moment = 0.6;
    std::complex<double> sum_sq(0, 0);
    double sum_abs2 = 0;
    for (int t = 0; t < m; ++t) {
        RngStream rng = seed_stream(41, t, "cplx2");
        auto h = sample_wigner(spec, rng);
        auto v = h.cplx(0, 5);
        sum_sq += v * v;
        sum_abs2 += std::norm(v);
    }
    CHECK((sum_sq.real() / m) * n == doctest::Approx(0.6).epsilon(0.15));
    CHECK(sum_abs2 / m * n == doctest::Approx(1.0).epsilon(0.1));
    spec.complex_second_moment = 1.5;
    CHECK_THROWS(spec.validate());
}

TEST_CASE("fixed-entry empirical mean is centered within 4 standard errors") {
    const int n = 8, m = 10000;
    double s = 0;
    for (int t = 0; t < m; ++t) {
        RngStream rng = seed_stream(35, t, "mean");
        auto h = sample_wigner(
            EnsembleSpec::wigner(n, Symmetry::real_symmetric, EntryDistribution::uniform_centered()),
            rng);
        s += h.real(2, 3);
    }
    double se = (1.0 / std::sqrt(static_cast<double>(n))) / std::sqrt(static_cast<double>(m));
    CHECK(std::abs(s / m) <= 4 * se);
}

TEST_CASE("determinism: identical spec and stream give identical matrices") {
    auto spec = EnsembleSpec::wigner(32, Symmetry::real_symmetric,
                                     EntryDistribution::bernoulli_symmetric());
    RngStream a = seed_stream(36, 5, "det");
    RngStream b = seed_stream(36, 5, "det");
    auto ha = sample_wigner(spec, a);
    auto hb = sample_wigner(spec, b);
    CHECK((ha.real.array() == hb.real.array()).all());
}

TEST_CASE("band profile: support, row sums, degradation") {
    const int n = 200, w = 20;
    auto p = VarianceProfile::band_indicator(n, w);
    CHECK(p.row_sum_error() < 1e-10);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int d = std::abs(i - j);
            d = std::min(d, n - d);
            if (d > w / 2) CHECK(p.at(i, j) == 0.0);
        }
    auto degraded = VarianceProfile::band_indicator(64, 40); // W > N/2
    CHECK(degraded.kind == VarianceProfile::Kind::flat);
    CHECK(!degraded.warning.empty());

    RngStream rng = seed_stream(37, 0, "band");
    auto h = sample_band(n, w, [](double x) { return std::abs(x) <= 0.5 ? 1.0 : 0.0; }, rng);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int d = std::abs(i - j);
            d = std::min(d, n - d);
            if (d > w / 2) CHECK(h.real(i, j) == 0.0);
        }
}

TEST_CASE("generalized profile records comparability constants") {
    const int n = 10;
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    auto p = VarianceProfile::generalized(s2);
    CHECK(p.c_inf == doctest::Approx(1.0));
    CHECK(p.c_sup == doctest::Approx(1.0));
    s2(0, 1) = s2(1, 0) = 2.0 / n;
    s2(0, 0) -= 1.0 / n; // keep row sums 1... adjust both rows
    s2(1, 1) -= 1.0 / n;
    auto p2 = VarianceProfile::generalized(s2);
    CHECK(p2.c_sup == doctest::Approx(2.0));
    Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(n, n, 0.5 / n);
    CHECK_THROWS(VarianceProfile::generalized(bad)); // rows sum to 1/2
}

TEST_CASE("erdos-renyi: validation, complete graph, entry mean, outlier") {
    RngStream rng = seed_stream(38, 0, "er");
    CHECK_THROWS(sample_erdos_renyi(100, 0.00001, rng)); // q < 1

    auto full = sample_erdos_renyi(30, 1.0, rng);
    double v0 = full.real(0, 0);
    CHECK(v0 > 0.0);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) CHECK(full.real(i, j) == v0);

    const int n = 400;
    const double p = 0.1;
    double q = std::sqrt(p * n), gamma = 1.0 / std::sqrt(1.0 - p);
    double s = 0;
    int m = 300;
    for (int t = 0; t < m; ++t) {
        RngStream r2 = seed_stream(38, t + 1, "er-mean");
        auto h = sample_erdos_renyi(n, p, r2);
        s += h.real(3, 7);
    }
    double mean_expect = gamma * q / n;
    CHECK(s / m == doctest::Approx(mean_expect).epsilon(0.15));

    // Largest eigenvalue near gamma q + 1/(gamma q) at N = 1000, p = 0.1.
    const int nn = 1000;
    double qq = std::sqrt(0.1 * nn), gg = 1.0 / std::sqrt(0.9);
    double predicted = gg * qq + 1.0 / (gg * qq);
    for (int t = 0; t < 2; ++t) {
        RngStream r3 = seed_stream(39, t, "er-max");
        auto h = sample_erdos_renyi(nn, 0.1, r3);
        auto ev = eigen_decompose(h, false).eigenvalues;
        CHECK(std::abs(ev(nn - 1) - predicted) < 0.1);
    }
}

TEST_CASE("quantile transform matches direct sampling in distribution") {
    auto g = EntryDistribution::gaussian();
    RngStream rng = seed_stream(40, 0, "quant");
    std::vector<double> via_q, direct;
    for (int i = 0; i < 20000; ++i) via_q.push_back(g.quantile(rng.uniform()));
    for (int i = 0; i < 20000; ++i) direct.push_back(g.sample(rng));
    CHECK(ks_distance(via_q, direct) < 0.02);
    // monotone
    CHECK(g.quantile(0.2) < g.quantile(0.8));
    auto tp = make_moment_matched_three_point();
    CHECK(tp.quantile(0.5) == 0.0);
    CHECK(tp.quantile(0.01) == doctest::Approx(-std::sqrt(3.0)));
}

TEST_CASE("spec validation catches dimension mismatch") {
    EnsembleSpec s = EnsembleSpec::goe(10);
    s.profile = VarianceProfile::flat(12);
    CHECK_THROWS(s.validate());
}
