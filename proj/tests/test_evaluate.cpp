#include "arqsched/evaluate.hpp"

#include "arqsched/capacity.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>

using namespace arqsched;

namespace {

const ChannelParams kChan(0.8, 0.2);

} // namespace

TEST_CASE("value reports carry policy labels and the instance echo") {
    const Instance inst = Instance::stationary(kChan, 2, 4, DelayPmf({0.5, 0.5}));
    const ValueReport opt = optimal_value(inst);
    CHECK(opt.policy == "optimal");
    CHECK(opt.episodes == 0);
    CHECK(opt.std_error == 0.0);
    CHECK(opt.instance.horizon == 4);

    const ValueReport greedy = policy_value_exact(inst, PolicySpec{});
    CHECK(greedy.policy == "greedy");
    CHECK(greedy.total <= opt.total + 1e-9);

    const ValueReport queue = policy_value_exact(inst, PolicySpec::parse("greedy-queue"));
    CHECK(queue.policy == "greedy-queue");
    CHECK(queue.total == doctest::Approx(greedy.total).epsilon(1e-15));

    const ValueReport mc = policy_value_mc(inst, ObservationMode::arq, PolicySpec{}, 2000, 11);
    CHECK(mc.policy == "greedy");
    CHECK(mc.episodes == 2000);
    CHECK(mc.std_error > 0.0);

    const ValueReport genie_mc =
        policy_value_mc(inst, ObservationMode::genie, PolicySpec{}, 2000, 11);
    CHECK(genie_mc.policy == "greedy@genie");

    CHECK_THROWS_AS(policy_value_exact(inst, PolicySpec::parse("alpha:1,0,1,1")),
                    std::invalid_argument);
}

TEST_CASE("greedy-queue exact evaluation needs a valid queue instance") {
    const Instance negative =
        Instance::stationary(ChannelParams(0.2, 0.8), 2, 4, DelayPmf::point_mass(0));
    CHECK_THROWS_AS(policy_value_exact(negative, PolicySpec::parse("greedy-queue")),
                    std::invalid_argument);
    Instance mixed = Instance::stationary(kChan, 2, 4, DelayPmf::point_mass(0));
    mixed.params[1] = ChannelParams(0.7, 0.1);
    CHECK_THROWS_AS(policy_value_exact(mixed, PolicySpec::parse("greedy-queue")),
                    std::invalid_argument);
}

TEST_CASE("genie closed form matches its single-user and steady-state identities") {
    const Instance one = Instance::stationary(kChan, 1, 9, DelayPmf({0.2, 0.5, 0.3}));
    CHECK(genie_value(one).total == doctest::Approx(9 * 0.5).epsilon(1e-12));

    // After the freshness distribution saturates, each slot contributes the
    // stationary genie reward from the sum-capacity series.
    const int m = 30;
    const DelayPmf pmf({0.3, 0.4, 0.3});
    const Instance big = Instance::stationary(kChan, 4, m, pmf);
    const ValueReport rep = genie_value(big);
    const double rate = genie_sum_capacity(kChan, pmf, 4).value;
    CHECK(rep.per_slot.back() == doctest::Approx(rate).epsilon(1e-12));
    CHECK(rep.per_slot[rep.per_slot.size() - 10] == doctest::Approx(rate).epsilon(1e-12));
}

TEST_CASE("genie closed form rejects what it cannot price") {
    Instance mixed = Instance::stationary(kChan, 2, 4, DelayPmf::point_mass(0));
    mixed.params[1] = ChannelParams(0.7, 0.1);
    CHECK_THROWS_AS(genie_value(mixed), std::invalid_argument);

    const Instance negative =
        Instance::stationary(ChannelParams(0.2, 0.8), 2, 4, DelayPmf::point_mass(0));
    CHECK_THROWS_AS(genie_value(negative), std::invalid_argument);
}

TEST_CASE("fresher delay laws never hurt the genie value") {
    const ChannelParams cp(0.5848, 0.3509);
    const std::vector<DelayPmf> tails = {
        DelayPmf({2.0 / 3.0, 1.0 / 3.0}),
        DelayPmf({0.5, 0.5}),
        DelayPmf({1.0 / 3.0, 2.0 / 3.0}),
        DelayPmf({0.0, 1.0}),
    };
    double prev = 1e9;
    for (const DelayPmf& pmf : tails) {
        const double v = genie_value(Instance::stationary(cp, 10, 10, pmf)).total;
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("closed-form policy values for fixed and random scheduling") {
    const Instance inst = Instance::homogeneous(kChan, {0.9, 0.3}, 5, DelayPmf::point_mass(1));
    double expect0 = 0.0;
    double expect1 = 0.0;
    for (int t = 5; t >= 1; --t) {
        expect0 += t_operator(0.9, static_cast<unsigned>(5 - t), kChan);
        expect1 += t_operator(0.3, static_cast<unsigned>(5 - t), kChan);
    }
    CHECK(fixed_user_value(inst, 0) == doctest::Approx(expect0).epsilon(1e-13));
    CHECK(fixed_user_value(inst, 1) == doctest::Approx(expect1).epsilon(1e-13));
    CHECK(random_policy_value(inst) ==
          doctest::Approx(0.5 * (expect0 + expect1)).epsilon(1e-13));
    CHECK_THROWS_AS(fixed_user_value(inst, 2), std::invalid_argument);
}

TEST_CASE("suboptimality report picks the exact route when feasible") {
    const Instance small = Instance::stationary(kChan, 2, 5, DelayPmf({0.5, 0.5}));
    CHECK(exactly_solvable(small));
    const SuboptimalityReport rep = suboptimality_report(small, 0, 0);
    CHECK(rep.exact_route);
    CHECK(rep.reference_label == "optimal");
    CHECK(rep.greedy_std_error == 0.0);
    // Two positively correlated users: greedy is optimal.
    CHECK(std::fabs(rep.percent) <= 1e-9);
}

TEST_CASE("suboptimality report falls back to the genie reference at scale") {
    const Instance big = Instance::stationary(kChan, 10, 10, DelayPmf({0.0, 1.0}));
    CHECK_FALSE(exactly_solvable(big));
    CHECK_THROWS_AS(suboptimality_report(big, 0, 0), std::invalid_argument);

    const SuboptimalityReport rep = suboptimality_report(big, 4000, 12);
    CHECK_FALSE(rep.exact_route);
    CHECK(rep.reference_label == "genie");
    CHECK(rep.greedy_std_error > 0.0);
    CHECK(rep.reference_value == doctest::Approx(genie_value(big).total).epsilon(1e-12));
    CHECK(rep.percent > 0.0); // the genie strictly beats delayed-ARQ greedy here
}

TEST_CASE("long-horizon greedy per-slot reward converges to the two-user sum capacity") {
    const ChannelParams cp(0.52, 0.48);
    const DelayPmf d0 = DelayPmf::point_mass(0);
    const Instance inst = Instance::stationary(cp, 2, 8, d0);
    const ValueReport rep = policy_value_exact(inst, PolicySpec{});
    const double c2 = sum_capacity_two_user(cp, d0).value;
    CHECK(rep.per_slot.back() == doctest::Approx(c2).epsilon(1e-6));
}

TEST_CASE("csv rows follow the documented column layout") {
    CHECK(value_csv_header() ==
          std::vector<std::string>{"policy", "N", "m", "p", "r", "delay_pmf", "value", "stderr",
                                   "runtime_ms"});

    const Instance inst = Instance::stationary(kChan, 2, 4, DelayPmf({0.5, 0.5}));
    const ValueReport rep = policy_value_exact(inst, PolicySpec{});
    const std::vector<std::string> row = value_csv_row(rep);
    REQUIRE(row.size() == 9);
    CHECK(row[0] == "greedy");
    CHECK(row[1] == "2");
    CHECK(row[2] == "4");
    CHECK(row[3] == "0.8");
    CHECK(row[4] == "0.2");
    CHECK(row[5] == "0.5,0.5");
    CHECK(row[7] == "0");

    Instance mixed = inst;
    mixed.params[1] = ChannelParams(0.7, 0.1);
    const std::vector<std::string> mrow = value_csv_row(policy_value_exact(mixed, PolicySpec{}));
    CHECK(mrow[3] == "0.8;0.7");
    CHECK(mrow[4] == "0.2;0.1");
}
