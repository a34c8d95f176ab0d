#include <doctest.h>

#include <cmath>

#include "rmtlab/numeric.hpp"
#include "rmtlab/semicircle_law.hpp"
#include "rmtlab/spectral.hpp"

using namespace rmtlab;
using Cx = std::complex<double>;

TEST_CASE("local law report: envelopes, preconditions, degenerate diagnostic") {
    auto spec = EnsembleSpec::goe(200);
    std::vector<Cx> bad{Cx(0.0, 1e-4)};
    CHECK_THROWS(local_law_report(spec, bad, 4, 1, false, 1)); // eta below 1/N
    std::vector<Cx> far{Cx(6.0, 1.0)};
    CHECK_THROWS(local_law_report(spec, far, 4, 1, false, 1)); // |E| > 5

    std::vector<Cx> grid{Cx(0.0, 0.5)};
    auto pts = local_law_report(spec, grid, 20, 91, true, 2);
    CHECK(pts[0].med_m_err >= 0.0);
    CHECK(pts[0].med_m_err <= 10.0 * pts[0].envelope_avg);
    CHECK(pts[0].max_offdiag <= 3.0 * pts[0].envelope_entry);
    CHECK(pts[0].max_diag_err <= 3.0 * pts[0].envelope_entry);

    // H = 0 diagnostic: m_N(i) = i against m_sc(i) = i (sqrt(5)-1)/2; the
    // gap is reported, not asserted against the Wigner envelopes.
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
    Cx m_n = stieltjes(zero, Cx(0.0, 1.0));
    CHECK(std::abs(m_n - Cx(0.0, 1.0)) < 1e-14);
    double gap = std::abs(m_n - m_sc(Cx(0.0, 1.0)));
    CHECK(gap == doctest::Approx(1.0 - (std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-10));
}

TEST_CASE("local law error is universal across entry distributions") {
    std::vector<Cx> grid{Cx(0.0, 0.2)};
    const int n = 300, samples = 60;
    std::vector<double> med, se;
    for (auto entries : {EntryDistribution::gaussian(), EntryDistribution::bernoulli_symmetric(),
                         make_moment_matched_three_point()}) {
        auto spec = EnsembleSpec::wigner(n, Symmetry::real_symmetric, entries);
        auto pts = local_law_report(spec, grid, samples, 92, false, 2);
        med.push_back(pts[0].med_m_err);
        se.push_back(pts[0].med_m_err_se);
    }
    for (size_t a = 0; a < med.size(); ++a)
        for (size_t b = a + 1; b < med.size(); ++b)
            CHECK(std::abs(med[a] - med[b]) <= 3.0 * (se[a] + se[b]));
}

TEST_CASE("rigidity statistic is invariant under the sign flip H -> -H") {
    const int n = 300, samples = 40;
    auto spec = EnsembleSpec::goe(n);
    auto gamma = classical_locations_sc(n);
    std::vector<double> direct, flipped;
    for (int s = 0; s < samples; ++s) {
        RngStream rng = seed_stream(93, s, "flip");
        auto h = sample_wigner(spec, rng);
        auto ev = eigen_decompose(h, false).eigenvalues;
        Eigen::MatrixXd neg = -h.real;
        auto ev2 = eigen_decompose(neg, false).eigenvalues;
        auto stat = [&](const Eigen::VectorXd& e) {
            double rmax = 0;
            for (int j = 0; j < n; ++j) {
                double w = std::cbrt(static_cast<double>(std::min(j + 1, n - j)));
                rmax = std::max(rmax, std::abs(e(j) - gamma[j]) * std::cbrt(n) * std::cbrt(n) * w);
            }
            return rmax;
        };
        direct.push_back(stat(ev));
        flipped.push_back(stat(ev2));
    }
    double se = stderr_median(direct) + stderr_median(flipped);
    CHECK(std::abs(median(direct) - median(flipped)) <= 3.0 * se);
}

TEST_CASE("delocalization: localized diagnostic input and the pigeonhole floor") {
    // H = e1 e1^T has the standard basis as eigenvectors: sup norm 1.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(12, 12);
    h(0, 0) = 1.0;
    auto sp = eigen_decompose(h, true);
    double worst = sp.vectors_real->array().abs().maxCoeff();
    CHECK(worst == doctest::Approx(1.0));

    RngStream rng = seed_stream(94, 0, "pigeon");
    auto g = sample_wigner(EnsembleSpec::goe(64), rng);
    auto sg = eigen_decompose(g, true);
    for (int a = 0; a < 64; ++a) {
        double sup2 = 0;
        for (int i = 0; i < 64; ++i)
            sup2 = std::max(sup2, sg.vectors_real->coeff(i, a) * sg.vectors_real->coeff(i, a));
        CHECK(sup2 >= 1.0 / 64.0);
    }
}

TEST_CASE("delocalization report at a small size looks delocalized") {
    auto rep = delocalization_report(EnsembleSpec::goe(200), 40, 95, 2);
    CHECK(rep.med < 25.0);
    CHECK(rep.med > 2.0 * std::log(200.0) * 0.5);
}

TEST_CASE("fluctuation averaging: identity route matches honest minors") {
    const int n = 50;
    Cx z(0.1, 0.4);
    for (int s = 0; s < 5; ++s) {
        RngStream rng = seed_stream(96, s, "flucavg");
        auto spec = EnsembleSpec::goe(n);
        auto h = sample_wigner(spec, rng);
        auto sp = eigen_decompose(h, true);
        const auto& u = *sp.vectors_real;
        Cx tr_g(0, 0);
        Eigen::VectorXcd w(n), w2(n);
        for (int a = 0; a < n; ++a) {
            Cx d = 1.0 / (sp.eigenvalues(a) - z);
            w(a) = d;
            w2(a) = d * d;
            tr_g += d;
        }
        for (int i = 0; i < n; i += 7) {
            Cx gii(0, 0), g2ii(0, 0);
            for (int a = 0; a < n; ++a) {
                double uu = u(i, a) * u(i, a);
                gii += uu * w(a);
                g2ii += uu * w2(a);
            }
            Cx z_fast = (h.real(i, i) - z - 1.0 / gii) - (tr_g - g2ii / gii) / static_cast<double>(n);
            Cx z_minor = fluctuation_z_from_minor(h, i, z);
            CHECK(std::abs(z_fast - z_minor) < 1e-9);
        }
    }
}

TEST_CASE("fluctuation averaging: Z is centered and [Z] beats |Z|") {
    auto spec = EnsembleSpec::goe(100);
    auto rep = fluctuation_averaging_report(spec, Cx(0.0, 0.3), 200, 97, 2);
    CHECK(std::abs(rep.mean_z) <= 4.0 * rep.mean_z_se);
    CHECK(median(rep.a_values) < median(rep.b_values));
    CHECK_THROWS(fluctuation_averaging_report(EnsembleSpec::gue(50), Cx(0, 0.3), 10, 1, 1));
}

TEST_CASE("Monte Carlo stability: doubling samples moves medians within noise") {
    std::vector<Cx> grid{Cx(0.0, 0.25)};
    auto spec = EnsembleSpec::goe(200);
    auto a = local_law_report(spec, grid, 60, 98, false, 2);
    auto b = local_law_report(spec, grid, 120, 98, false, 2);
    CHECK(std::abs(a[0].med_m_err - b[0].med_m_err) <=
          3.0 * (a[0].med_m_err_se + b[0].med_m_err_se));
}

TEST_CASE("Helffer-Sjostrand reconstruction") {
    double r0 = hs_identity_check(bump_c2, bump_c2_d1, bump_c2_d2, -1, 1, 0.0, 400);
    CHECK(r0 <= 1e-4);
    double r_half = hs_identity_check(bump_c2, bump_c2_d1, bump_c2_d2, -1, 1, 0.4, 400);
    CHECK(r_half <= 1e-4);
    double r5 = hs_identity_check(bump_c2, bump_c2_d1, bump_c2_d2, -1, 1, 5.0, 400);
    CHECK(r5 <= 1e-6);
    auto zero = [](double) { return 0.0; };
    CHECK(hs_identity_check(zero, zero, zero, -1, 1, 0.0, 200) == 0.0);
}
