#include <doctest.h>

#include <cmath>

#include "rmtlab/compare.hpp"
#include "rmtlab/numeric.hpp"

using namespace rmtlab;
using Cx = std::complex<double>;

TEST_CASE("moment gaps classify the matching order") {
    auto g = EntryDistribution::gaussian();
    auto tp = make_moment_matched_three_point();
    auto ber = EntryDistribution::bernoulli_symmetric();

    auto m1 = moment_gap(g, tp);
    CHECK(m1.matching_order == 4);
    for (double x : m1.gaps) CHECK(x <= 1e-12);

    auto m2 = moment_gap(g, ber);
    CHECK(m2.matching_order == 3);
    CHECK(m2.gaps[0] == 0.0);
    CHECK(m2.gaps[1] == 0.0);
    CHECK(m2.gaps[2] == 0.0);
    CHECK(m2.gaps[3] == doctest::Approx(2.0));

    auto m3 = moment_gap(ber, ber);
    CHECK(m3.matching_order == 4);
}

TEST_CASE("OU matching: exact at t=0, delta* window for the worked example") {
    auto ber = EntryDistribution::bernoulli_symmetric();
    auto at0 = ou_matching_check(ber, 0.0, 1000, 0.9);
    CHECK(at0.holds);
    CHECK(at0.max_delta == doctest::Approx(10.0)); // order-infinity match

    auto m = ou_matching_check(ber, 1.0 / 1000.0, 1000, 0.75);
    CHECK(m.holds);
    CHECK(m.gaps[0] == 0.0);
    CHECK(m.gaps[1] == 0.0); // s = 1, 2 invariant under the flow
    CHECK(m.gaps[3] == doctest::Approx(2.0 * (1.0 - std::exp(-2.0 / 1000.0))).epsilon(1e-10));
    CHECK(m.max_delta > 0.75);
    CHECK(m.max_delta < 0.85);
    auto strict = ou_matching_check(ber, 1.0 / 1000.0, 1000, 1.0);
    CHECK(!strict.holds);
}

TEST_CASE("swap experiment: telescoping is exact, updates track re-inversion") {
    auto sum = swap_experiment(EntryDistribution::gaussian(),
                               EntryDistribution::bernoulli_symmetric(), 50, Cx(0.0, 1.0), 6, 101,
                               2);
    CHECK(sum.telescoping_residual <= 1e-10);
    CHECK(sum.update_vs_fresh <= 1e-8);
    CHECK(sum.checkpoint_mean.size() > 10);

    // identical laws: endpoint difference is pure Monte Carlo noise
    auto same = swap_experiment(EntryDistribution::gaussian(), EntryDistribution::gaussian(), 50,
                                Cx(0.0, 1.0), 8, 102, 2);
    CHECK(std::abs(same.endpoint_diff) <= 4.0 * same.endpoint_diff_se);
    CHECK_THROWS(swap_experiment(EntryDistribution::gaussian(), EntryDistribution::gaussian(), 500,
                                 Cx(0.0, 1.0), 1, 1, 1)); // N cap
}

TEST_CASE("coupled trace difference: identical laws couple to exactly zero") {
    auto d = trace_difference_direct(EntryDistribution::gaussian(), EntryDistribution::gaussian(),
                                     60, Cx(0.0, 1.0), 20, 103, 2);
    CHECK(std::abs(d.mean_diff) == 0.0);
    CHECK(d.se == 0.0);
}

TEST_CASE("three-moment pair difference obeys the pilot envelope at N=200") {
    auto d = trace_difference_direct(EntryDistribution::gaussian(),
                                     EntryDistribution::bernoulli_symmetric(), 200, Cx(0.0, 1.0),
                                     300, 104, 2);
    CHECK(std::abs(d.mean_diff) <= 5.0 / 200.0);
    CHECK(std::abs(d.mean_diff) > 0.0);
}
