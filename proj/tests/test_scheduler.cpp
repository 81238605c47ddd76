#include "arqsched/scheduler.hpp"

#include "doctest.h"

#include <stdexcept>
#include <vector>

using namespace arqsched;

namespace {

FeedbackEvent arrived(int user, int origin, bool ack) {
    return FeedbackEvent{user, origin, ack, origin};
}

} // namespace

TEST_CASE("belief tracker computes delayed-feedback beliefs on demand") {
    const ChannelParams cp(0.8, 0.2);
    BeliefTracker tracker(cp, {0.5, 0.5}, 10);

    CHECK(tracker.record(0, true, 7));
    CHECK(tracker.belief_at(0, 5) == doctest::Approx(0.68).epsilon(1e-15));
    CHECK(tracker.belief_at(0, 6) == doctest::Approx(0.8).epsilon(1e-15));

    // Unobserved users advance from the initial belief.
    CHECK(tracker.belief_at(1, 10) == 0.5);
    CHECK(tracker.belief_at(1, 8) == doctest::Approx(t_operator(0.5, 2, cp)).epsilon(1e-15));
}

TEST_CASE("stale feedback is ignored") {
    const ChannelParams cp(0.8, 0.2);
    BeliefTracker tracker(cp, {0.5}, 10);

    CHECK(tracker.record(0, true, 5));
    // Slot indices decrease with time: slot 6 predates slot 5.
    CHECK_FALSE(tracker.record(0, false, 6));
    CHECK_FALSE(tracker.record(0, false, 5));
    REQUIRE(tracker.latest(0).has_value());
    CHECK(tracker.latest(0)->ack);
    CHECK(tracker.latest(0)->origin_slot == 5);

    tracker.update_arrivals({arrived(0, 7, false)});
    CHECK(tracker.latest(0)->origin_slot == 5);
    CHECK(tracker.record(0, false, 3));
    CHECK(tracker.latest(0)->origin_slot == 3);
}

TEST_CASE("tracker input validation") {
    const ChannelParams cp(0.8, 0.2);
    CHECK_THROWS_AS(BeliefTracker(cp, {}, 5), std::invalid_argument);
    CHECK_THROWS_AS(BeliefTracker(cp, {1.5}, 5), std::invalid_argument);
    CHECK_THROWS_AS(BeliefTracker(cp, {0.5}, 0), std::invalid_argument);

    BeliefTracker tracker(cp, {0.5, 0.5}, 5);
    CHECK_THROWS_AS(tracker.record(2, true, 3), std::out_of_range);
    CHECK_THROWS_AS(tracker.record(0, true, 0), std::invalid_argument);
    CHECK_THROWS_AS(tracker.record(0, true, 6), std::invalid_argument);
    CHECK_THROWS_AS(tracker.belief_at(0, 0), std::out_of_range);
    tracker.record(0, true, 4);
    CHECK_THROWS_AS(tracker.belief_at(0, 4), std::logic_error);
}

TEST_CASE("greedy argmax picks the highest belief, first index on ties") {
    const ChannelParams cp(0.8, 0.2);

    BeliefTracker abc(cp, {0.3, 0.7, 0.5}, 1);
    CHECK(abc.greedy_user(1) == 1);

    BeliefTracker tie(cp, {0.4, 0.4}, 1);
    CHECK(tie.greedy_user(1) == 0);

    // NACK one slot ago vs ACK three slots ago: the older ACK still wins.
    BeliefTracker mixed(cp, {0.5, 0.5}, 8);
    mixed.record(0, false, 3);
    mixed.record(1, true, 5);
    CHECK(mixed.belief_at(0, 2) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mixed.belief_at(1, 2) == doctest::Approx(0.608).epsilon(1e-15));
    CHECK(mixed.greedy_user(2) == 1);
}

TEST_CASE("beliefs stay inside the unit interval") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const double r = rng.next_unit();
        const double p = rng.next_unit();
        if (p == 1.0 && r == 0.0) continue;
        const ChannelParams cp(p, r);
        const int m = 2 + rng.next_below(10);
        BeliefTracker tracker(cp, {rng.next_unit(), rng.next_unit()}, m);
        for (int t = m; t >= 1; --t) {
            for (int u = 0; u < 2; ++u) {
                const double b = tracker.belief_at(u, t);
                CHECK(b >= 0.0);
                CHECK(b <= 1.0);
            }
            if (t < m && rng.next_bernoulli(0.5)) {
                tracker.record(rng.next_below(2), rng.next_bernoulli(0.5), t + 1);
            }
        }
    }
}

TEST_CASE("schedule order vector decides by queue position") {
    const ChannelParams cp(0.8, 0.2);

    ScheduleOrderVector osv(cp, {0.3, 0.6, 0.5, 0.2});
    // X queue alone: ordered by initial belief.
    CHECK(osv.decide() == 1);
    CHECK(osv.flatten() == std::vector<int>{1, 2, 0, 3});

    // ACKs order by recency (min origin first).
    CHECK(osv.apply(2, true, 8));
    CHECK(osv.apply(0, true, 5));
    CHECK(osv.decide() == 0);
    CHECK(osv.flatten() == std::vector<int>{0, 2, 1, 3});

    // NACKs go behind the unobserved, oldest NACK first.
    CHECK(osv.apply(1, false, 9));
    CHECK(osv.apply(3, false, 4));
    CHECK(osv.decide() == 0);
    CHECK(osv.flatten() == std::vector<int>{0, 2, 1, 3});

    // All NACKed: oldest (largest origin) leads.
    ScheduleOrderVector nacks(cp, {0.5, 0.5});
    CHECK(nacks.apply(0, false, 4));
    CHECK(nacks.apply(1, false, 9));
    CHECK(nacks.decide() == 1);
}

TEST_CASE("schedule order vector rejects nonpositive memory and stale feedback") {
    CHECK_THROWS_AS(ScheduleOrderVector(ChannelParams(0.2, 0.8), {0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ScheduleOrderVector(ChannelParams(0.5, 0.5), {0.5, 0.5}),
                    std::invalid_argument);

    ScheduleOrderVector osv(ChannelParams(0.8, 0.2), {0.5, 0.5});
    CHECK(osv.apply(0, true, 5));
    CHECK_FALSE(osv.apply(0, false, 7)); // older than what user 0 already reported
    CHECK_FALSE(osv.apply(0, false, 5));
    CHECK(osv.flatten() == std::vector<int>{0, 1});
}

TEST_CASE("queue decisions equal belief argmax across random episodes") {
    Rng rng(404);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + rng.next_below(5); // up to 6 users
        const int m = 2 + rng.next_below(11); // up to 12 slots
        const double r = rng.next_unit() * 0.9;
        const double p = r + (1.0 - r) * (0.05 + 0.95 * rng.next_unit());
        const ChannelParams cp(p, r);

        std::vector<double> init(static_cast<std::size_t>(n));
        for (double& x : init) x = rng.next_unit();
        std::vector<double> dprobs(static_cast<std::size_t>(1 + rng.next_below(4)));
        double sum = 0.0;
        for (double& q : dprobs) sum += (q = 0.1 + rng.next_unit());
        for (double& q : dprobs) q /= sum;
        const DelayPmf pmf(dprobs);

        BeliefTracker tracker(cp, init, m);
        ScheduleOrderVector osv(cp, init);
        std::vector<ChannelState> state(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u) {
            state[static_cast<std::size_t>(u)] =
                rng.next_bernoulli(init[static_cast<std::size_t>(u)]) ? ChannelState::on
                                                                      : ChannelState::off;
        }
        std::vector<FeedbackEvent> in_flight;
        for (int t = m; t >= 1; --t) {
            const int queue_pick = osv.decide();
            CHECK(queue_pick == tracker.greedy_user(t));

            const bool on = state[static_cast<std::size_t>(queue_pick)] == ChannelState::on;
            const FeedbackEvent ev = FeedbackEvent::make(queue_pick, t, on, pmf.sample(rng));
            if (ev.arrival_slot >= 1) in_flight.push_back(ev);
            ArrivalSplit split = arrivals_at_slot_end(in_flight, t);
            tracker.update_arrivals(split.arrived);
            osv.update_arrivals(split.arrived);
            in_flight = std::move(split.pending);

            if (t > 1) {
                for (int u = 0; u < n; ++u) {
                    state[static_cast<std::size_t>(u)] =
                        transition(state[static_cast<std::size_t>(u)], cp, rng);
                }
            }
        }
    }
}

TEST_CASE("deterministic-delay shortcut reproduces the general queue update") {
    // Under a point-mass delay every arrival is system-newest, so placing the
    // ACKed user on top and the NACKed user at the bottom is the whole update.
    Rng rng(808);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + rng.next_below(4);
        const int m = 3 + rng.next_below(8);
        const int d = rng.next_below(3);
        const ChannelParams cp(0.85, 0.25);

        std::vector<double> init(static_cast<std::size_t>(n));
        for (double& x : init) x = rng.next_unit();

        ScheduleOrderVector general(cp, init);
        ScheduleOrderVector shortcut(cp, init);
        std::vector<ChannelState> state(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u) {
            state[static_cast<std::size_t>(u)] =
                rng.next_bernoulli(init[static_cast<std::size_t>(u)]) ? ChannelState::on
                                                                      : ChannelState::off;
        }
        std::vector<FeedbackEvent> in_flight;
        for (int t = m; t >= 1; --t) {
            const int pick = general.decide();
            CHECK(pick == shortcut.decide());

            const bool on = state[static_cast<std::size_t>(pick)] == ChannelState::on;
            const FeedbackEvent ev = FeedbackEvent::make(pick, t, on, d);
            if (ev.arrival_slot >= 1) in_flight.push_back(ev);
            ArrivalSplit split = arrivals_at_slot_end(in_flight, t);
            general.update_arrivals(split.arrived);
            for (const FeedbackEvent& fb : split.arrived) {
                if (fb.ack) {
                    shortcut.place_on_top(fb.user, fb.origin_slot);
                } else {
                    shortcut.place_at_bottom(fb.user, fb.origin_slot);
                }
            }
            in_flight = std::move(split.pending);
            CHECK(general.flatten() == shortcut.flatten());

            if (t > 1) {
                for (int u = 0; u < n; ++u) {
                    state[static_cast<std::size_t>(u)] =
                        transition(state[static_cast<std::size_t>(u)], cp, rng);
                }
            }
        }
    }
}

TEST_CASE("instantaneous feedback turns the queue into round robin") {
    const ChannelParams cp(0.8, 0.2);
    ScheduleOrderVector osv(cp, {0.9, 0.6, 0.3});
    const int m = 12;
    Rng rng(55);
    int prev_pick = -1;
    bool prev_ack = false;
    for (int t = m; t >= 1; --t) {
        const int pick = osv.decide();
        if (prev_pick >= 0) {
            if (prev_ack) {
                CHECK(pick == prev_pick); // ACK keeps the user on top
            } else {
                CHECK(pick != prev_pick);
                CHECK(osv.flatten().back() == prev_pick); // NACK sent it to the bottom
            }
        }
        const bool ack = rng.next_bernoulli(0.5);
        if (ack) {
            osv.place_on_top(pick, t);
        } else {
            osv.place_at_bottom(pick, t);
        }
        prev_pick = pick;
        prev_ack = ack;
    }
}

TEST_CASE("front placement guards against stale feedback") {
    ScheduleOrderVector osv(ChannelParams(0.8, 0.2), {0.5, 0.5});
    osv.place_on_top(0, 6);
    CHECK_THROWS_AS(osv.place_on_top(1, 7), std::logic_error);
    CHECK_THROWS_AS(osv.place_at_bottom(1, 6), std::logic_error);
    osv.place_at_bottom(1, 5);
    CHECK(osv.flatten() == std::vector<int>{0, 1});
}

TEST_CASE("alpha case indexing covers the four joint states") {
    CHECK(alpha_case(false, false) == 0);
    CHECK(alpha_case(false, true) == 1);
    CHECK(alpha_case(true, false) == 2);
    CHECK(alpha_case(true, true) == 3);
}
