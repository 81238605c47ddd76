#include "arqsched/capacity.hpp"

#include "arqsched/problem.hpp"
#include "arqsched/rng.hpp"
#include "arqsched/simulate.hpp"

#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace arqsched;

namespace {

const ChannelParams kChan(0.8, 0.2);

DelayPmf random_pmf(Rng& rng, int max_dmax) {
    std::vector<double> probs(static_cast<std::size_t>(1 + rng.next_below(max_dmax + 1)));
    double sum = 0.0;
    for (double& q : probs) sum += (q = 0.05 + rng.next_unit());
    for (double& q : probs) q /= sum;
    return DelayPmf(probs);
}

ChannelParams random_channel(Rng& rng) {
    const double p = 0.02 + 0.96 * rng.next_unit();
    const double r = 0.02 + 0.96 * rng.next_unit();
    return {p, r};
}

} // namespace

TEST_CASE("two-user sum capacity hand values") {
    CHECK(sum_capacity_two_user(kChan, DelayPmf::point_mass(0)).value ==
          doctest::Approx(0.65).epsilon(1e-15));
    CHECK(sum_capacity_two_user(kChan, DelayPmf({0.5, 0.5})).value ==
          doctest::Approx(0.62).epsilon(1e-15));

    const CapacityResult res = sum_capacity_two_user(kChan, DelayPmf({0.5, 0.5}));
    REQUIRE(res.terms.size() == 2);
    CHECK(res.terms[0] == doctest::Approx(0.65 * 0.5).epsilon(1e-15));
    CHECK(res.terms[1] == doctest::Approx(0.59 * 0.5).epsilon(1e-15));
    CHECK(res.terms[0] + res.terms[1] == doctest::Approx(res.value).epsilon(1e-15));
}

TEST_CASE("deterministic delay reduces the capacity series to a single term") {
    Rng rng(1001);
    for (int trial = 0; trial < 100; ++trial) {
        const ChannelParams cp = random_channel(rng);
        const int d = rng.next_below(8);
        const double ps = steady_state(cp);
        const double expect = ps * t_operator(cp.p, static_cast<unsigned>(d), cp) +
                              (1.0 - ps) * ps;
        CHECK(sum_capacity_two_user(cp, DelayPmf::point_mass(d)).value == expect);
    }
}

TEST_CASE("two users get no help from the genie") {
    Rng rng(1002);
    for (int trial = 0; trial < 1000; ++trial) {
        const ChannelParams cp = random_channel(rng);
        const DelayPmf pmf = random_pmf(rng, 4);
        CHECK(genie_sum_capacity(cp, pmf, 2).value ==
              doctest::Approx(sum_capacity_two_user(cp, pmf).value).epsilon(1e-12));
    }
}

TEST_CASE("genie capacity limits") {
    const DelayPmf d0 = DelayPmf::point_mass(0);
    Rng rng(1003);
    for (int trial = 0; trial < 50; ++trial) {
        const ChannelParams cp = random_channel(rng);
        CHECK(genie_sum_capacity(cp, random_pmf(rng, 4), 1).value ==
              doctest::Approx(steady_state(cp)).epsilon(1e-13));
    }

    // With many users somebody is almost surely ON.
    const double ps = steady_state(kChan);
    const double q50 = std::pow(1.0 - ps, 50);
    CHECK(genie_sum_capacity(kChan, d0, 50).value ==
          doctest::Approx(0.8 * (1.0 - q50) + 0.2 * q50).epsilon(1e-3));

    CHECK_THROWS_AS(genie_sum_capacity(kChan, d0, 0), std::invalid_argument);
}

TEST_CASE("three-user sandwich bounds") {
    const CapacityBounds b = sum_capacity_bounds(kChan, DelayPmf::point_mass(0), 3);
    CHECK(b.lower == doctest::Approx(0.65).epsilon(1e-15));
    CHECK(b.upper == doctest::Approx(0.725).epsilon(1e-15));
    CHECK(b.lower <= b.upper);

    CHECK_THROWS_AS(sum_capacity_bounds(kChan, DelayPmf::point_mass(0), 2),
                    std::invalid_argument);

    // The sandwich ordering is a positive-correlation statement.
    Rng rng(1004);
    for (int trial = 0; trial < 50; ++trial) {
        const double r = rng.next_unit() * 0.9;
        const double p = r + (1.0 - r) * (0.05 + 0.95 * rng.next_unit());
        const DelayPmf pmf = random_pmf(rng, 3);
        const CapacityBounds bounds =
            sum_capacity_bounds(ChannelParams(p, r), pmf, 3 + rng.next_below(8));
        CHECK(bounds.lower <= bounds.upper + 1e-12);
    }
}

TEST_CASE("sum capacity is nonincreasing in a deterministic delay") {
    Rng rng(1005);
    for (int trial = 0; trial < 30; ++trial) {
        const double r = rng.next_unit() * 0.9;
        const double p = r + (1.0 - r) * (0.05 + 0.95 * rng.next_unit());
        const ChannelParams cp(p, r);
        double prev = 1.0;
        for (int d = 0; d <= 10; ++d) {
            const double c2 = sum_capacity_two_user(cp, DelayPmf::point_mass(d)).value;
            CHECK(c2 <= prev + 1e-12);
            prev = c2;
        }
    }
}

TEST_CASE("region bounds carry the documented vertex and constraint sets") {
    const DelayPmf pmf({0.5, 0.5});

    const RegionBounds two = region_bounds(kChan, pmf, 2);
    CHECK(two.outer.dimension == 2);
    CHECK(two.outer.constraints.size() == 3);
    REQUIRE(two.inner.size() == 4);
    const double ps = steady_state(kChan);
    const double half_c2 = sum_capacity_two_user(kChan, pmf).value / 2.0;
    CHECK(two.inner[0].label == "O");
    CHECK(two.inner[1].label == "X1");
    CHECK(two.inner[1].coordinates == std::vector<double>{ps, 0.0});
    CHECK(two.inner[2].coordinates == std::vector<double>{0.0, ps});
    CHECK(two.inner[3].label == "Y1,2");
    CHECK(two.inner[3].coordinates == std::vector<double>{half_c2, half_c2});

    const RegionBounds three = region_bounds(kChan, pmf, 3);
    CHECK(three.outer.constraints.size() == 7);
    CHECK(three.inner.size() == 7);

    CHECK_THROWS_AS(region_bounds(kChan, pmf, 1), std::invalid_argument);
    CHECK_THROWS_AS(region_bounds(kChan, pmf, 17), std::invalid_argument);
}

TEST_CASE("the symmetric inner vertex saturates its pairwise outer constraint") {
    Rng rng(1006);
    for (int trial = 0; trial < 100; ++trial) {
        const ChannelParams cp = random_channel(rng);
        const DelayPmf pmf = random_pmf(rng, 3);
        const double half_c2 = sum_capacity_two_user(cp, pmf).value / 2.0;
        const double pair_bound = genie_sum_capacity(cp, pmf, 2).value;
        CHECK(2.0 * half_c2 == doctest::Approx(pair_bound).epsilon(1e-12));
    }
}

TEST_CASE("every inner vertex satisfies every outer constraint") {
    // Nesting relies on p > r: only then does the per-subset genie bound grow
    // with the subset size.
    Rng rng(1007);
    for (int n = 2; n <= 5; ++n) {
        const double r = rng.next_unit() * 0.9;
        const double p = r + (1.0 - r) * (0.05 + 0.95 * rng.next_unit());
        const ChannelParams cp(p, r);
        const DelayPmf pmf = random_pmf(rng, 3);
        const RegionBounds rb = region_bounds(cp, pmf, n);
        for (const RegionVertex& v : rb.inner) {
            for (const OuterConstraint& c : rb.outer.constraints) {
                double lhs = 0.0;
                for (int u : c.users) lhs += v.coordinates[static_cast<std::size_t>(u)];
                CHECK(lhs <= c.bound + 1e-9);
            }
        }
    }
}

TEST_CASE("exact two-user genie region vertices") {
    const DelayPmf d0 = DelayPmf::point_mass(0);
    const std::vector<RegionVertex> region = genie_region_n2(kChan, d0);
    REQUIRE(region.size() == 5);
    CHECK(region[0].label == "O");
    CHECK(region[1].label == "X1");
    CHECK(region[2].label == "Z1");
    CHECK(region[2].coordinates[0] == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(region[2].coordinates[1] == doctest::Approx(0.2).epsilon(1e-15));
    // Z2 mirrors Z1.
    CHECK(region[3].coordinates[0] == region[2].coordinates[1]);
    CHECK(region[3].coordinates[1] == region[2].coordinates[0]);

    CHECK_THROWS_AS(genie_region_n2(kChan, DelayPmf({0.5, 0.5})), std::invalid_argument);

    Rng rng(1008);
    for (int trial = 0; trial < 200; ++trial) {
        const ChannelParams cp = random_channel(rng);
        const int d = rng.next_below(5);
        const std::vector<RegionVertex> reg = genie_region_n2(cp, DelayPmf::point_mass(d));
        const double c2 = sum_capacity_two_user(cp, DelayPmf::point_mass(d)).value;
        CHECK(reg[2].coordinates[0] + reg[2].coordinates[1] ==
              doctest::Approx(c2).epsilon(1e-12));
        CHECK(reg[3].coordinates[0] + reg[3].coordinates[1] ==
              doctest::Approx(c2).epsilon(1e-12));
    }
}

TEST_CASE("alpha scheduler throughput identities") {
    Rng rng(1009);
    for (int trial = 0; trial < 100; ++trial) {
        const ChannelParams cp = random_channel(rng);
        const int d = rng.next_below(4);
        const std::vector<RegionVertex> region = genie_region_n2(cp, DelayPmf::point_mass(d));
        const double ps = steady_state(cp);

        const AlphaThroughputs z1 = alpha_throughputs(cp, d, {1.0, 0.0, 1.0, 1.0});
        CHECK(z1.mu1 == doctest::Approx(region[2].coordinates[0]).epsilon(1e-12));
        CHECK(z1.mu2 == doctest::Approx(region[2].coordinates[1]).epsilon(1e-12));

        const AlphaThroughputs z2 = alpha_throughputs(cp, d, {0.0, 0.0, 1.0, 0.0});
        CHECK(z2.mu1 == doctest::Approx(region[3].coordinates[0]).epsilon(1e-12));
        CHECK(z2.mu2 == doctest::Approx(region[3].coordinates[1]).epsilon(1e-12));

        const AlphaThroughputs always1 = alpha_throughputs(cp, d, {1.0, 1.0, 1.0, 1.0});
        CHECK(always1.mu1 == doctest::Approx(ps).epsilon(1e-12));
        CHECK(always1.mu2 == 0.0);

        // Balanced middle cases collapse the sum to the steady state...
        std::array<double, 4> mid{rng.next_unit(), rng.next_unit(), 0.0, rng.next_unit()};
        mid[2] = mid[1];
        const AlphaThroughputs m = alpha_throughputs(cp, d, mid);
        CHECK(m.sum() == doctest::Approx(ps).epsilon(1e-12));

        // ...and the general sum follows the one-line formula.
        const std::array<double, 4> any{rng.next_unit(), rng.next_unit(), rng.next_unit(),
                                        rng.next_unit()};
        const AlphaThroughputs g = alpha_throughputs(cp, d, any);
        const double tdp = t_operator(cp.p, static_cast<unsigned>(d), cp);
        const double tdr = t_operator(cp.r, static_cast<unsigned>(d), cp);
        CHECK(g.sum() ==
              doctest::Approx(ps + (1.0 - ps) * ps * (tdp - tdr) * (any[2] - any[1]))
                  .epsilon(1e-12));
    }

    CHECK_THROWS_AS(alpha_throughputs(kChan, 0, {1.2, 0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(alpha_throughputs(kChan, -1, {1.0, 0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("edge points bracket the achievable first coordinate") {
    Rng rng(1010);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = rng.next_unit() * 0.9;
        const double p = r + (1.0 - r) * (0.05 + 0.95 * rng.next_unit());
        const ChannelParams cp(p, r);
        const int d = rng.next_below(3);
        const double a1 = rng.next_unit();
        const std::array<double, 4> alpha{rng.next_unit(), a1, a1 + (1.0 - a1) * rng.next_unit(),
                                          rng.next_unit()};
        const AlphaThroughputs mu = alpha_throughputs(cp, d, alpha);
        const AlphaEdgePoints edges = alpha_edge_points(cp, d, alpha);
        CHECK(mu.mu1 <= edges.e_x1z1.mu1 + 1e-12);
        CHECK(mu.mu1 >= edges.e_x2z2.mu1 - 1e-12);
    }

    CHECK_THROWS_AS(alpha_edge_points(kChan, 0, {0.0, 0.9, 0.1, 0.0}), std::invalid_argument);
}

TEST_CASE("hull membership by convex-combination feasibility") {
    const DelayPmf d0 = DelayPmf::point_mass(0);
    const std::vector<RegionVertex> region = genie_region_n2(kChan, d0);

    for (const RegionVertex& v : region) {
        CHECK(hull_contains(region, v.coordinates));
    }
    std::vector<double> centroid(2, 0.0);
    for (const RegionVertex& v : region) {
        centroid[0] += v.coordinates[0] / region.size();
        centroid[1] += v.coordinates[1] / region.size();
    }
    CHECK(hull_contains(region, centroid));

    const double ps = steady_state(kChan);
    CHECK_FALSE(hull_contains(region, {ps + 0.01, ps + 0.01}));
    CHECK_FALSE(hull_contains(region, {1.0, 1.0}));

    const RegionBounds rb = region_bounds(kChan, d0, 2);
    CHECK(hull_contains(rb.inner, {ps / 2.0, ps / 2.0}));
    CHECK_FALSE(hull_contains(rb.inner, {ps + 0.01, ps + 0.01}));

    CHECK_THROWS_AS(hull_contains(region, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(hull_contains({}, {0.5}), std::invalid_argument);

    // Higher-dimensional valid and invalid points for the same solver.
    const RegionBounds rb4 = region_bounds(kChan, d0, 4);
    CHECK(hull_contains(rb4.inner, {0.0, 0.0, 0.0, 0.0}));
    CHECK(hull_contains(rb4.inner, rb4.inner[2].coordinates));
    std::vector<double> mix(4, 0.0);
    for (const RegionVertex& v : rb4.inner) {
        for (std::size_t i = 0; i < 4; ++i) {
            mix[i] += v.coordinates[i] / static_cast<double>(rb4.inner.size());
        }
    }
    CHECK(hull_contains(rb4.inner, mix));
    CHECK_FALSE(hull_contains(rb4.inner, {ps, ps, ps, ps}));
}

TEST_CASE("random alpha schedulers stay inside the exact genie region") {
    Rng rng(1011);
    for (int trial = 0; trial < 500; ++trial) {
        const double r = 0.05 + 0.85 * rng.next_unit();
        const double p = r + (1.0 - r) * (0.05 + 0.9 * rng.next_unit());
        const ChannelParams cp(p, r);
        const int d = rng.next_below(3);
        const std::vector<RegionVertex> region = genie_region_n2(cp, DelayPmf::point_mass(d));
        const std::array<double, 4> alpha{rng.next_unit(), rng.next_unit(), rng.next_unit(),
                                          rng.next_unit()};
        const AlphaThroughputs mu = alpha_throughputs(cp, d, alpha);
        CHECK(hull_contains(region, {mu.mu1, mu.mu2}));
    }
}

TEST_CASE("alpha simulation matches the stationary throughput formulas") {
    // Under steady-state initialization the first d+1 slots pay the steady
    // reward and every later slot pays mu1 + mu2.
    const ChannelParams cp(0.8, 0.3);
    const int d = 1;
    const int m = 10;
    const std::array<double, 4> alpha{0.3, 0.1, 0.8, 0.6};
    const AlphaThroughputs mu = alpha_throughputs(cp, d, alpha);
    const double ps = steady_state(cp);
    const double expect = (d + 1) * ps + (m - d - 1) * mu.sum();

    const Instance inst = Instance::stationary(cp, 2, m, DelayPmf::point_mass(d));
    PolicySpec spec;
    spec.kind = PolicySpec::Kind::alpha;
    spec.alpha = alpha;
    const McEstimate est = simulate_policy(inst, ObservationMode::genie, spec, 400000, 77);
    CHECK(std::fabs(est.mean - expect) <= 4.0 * est.std_error);
}
