#pragma once

#include "arqsched/channel.hpp"

#include <array>
#include <vector>

namespace arqsched {

// Three identical users, deterministic feedback delay of one slot, horizon 4,
// nonincreasing initial beliefs, p > r. Greedy schedules user 0 in slots 4
// and 3; the deviating policy schedules user 1 in slot 3 instead and is
// strictly better on part of the parameter space.
struct M4Instance {
    ChannelParams params;
    std::array<double, 3> initial_beliefs;
};

// Closed-form value difference (deviation minus greedy); positive means
// greedy is suboptimal.
double greedy_vs_tilde_gap_m4(const M4Instance& instance);

// Branch-by-branch audit of the same two values. Each branch fixes the
// revealed bits: the slot-4 bit of the user scheduled in slot 4 and the
// slot-3 bit of the user scheduled in slot 3. Decisions in slots 2 and 1 are
// recomputed from the usable-feedback beliefs; rewards are conditional on the
// branch bits.
struct M4BranchRow {
    bool f4 = false;
    bool f3 = false;
    double probability = 0.0;
    std::array<int, 2> actions{}; // slots 2 and 1
    double expected_reward = 0.0; // conditional total over slots 4..1
};

struct M4Enumeration {
    std::vector<M4BranchRow> greedy_rows; // (f4,f3) = (1,1),(1,0),(0,1),(0,0)
    std::vector<M4BranchRow> tilde_rows;
    double greedy_total = 0.0;
    double tilde_total = 0.0;
    double gap = 0.0; // tilde_total - greedy_total
};

M4Enumeration m4_enumerate(const M4Instance& instance);

// Horizon-m generalization (m >= 5, N >= 3 users, deterministic delay 1):
// the deviating policy acts like greedy except on realizations where users 0
// and 1 stay on from slot m through slot 5; there it deviates to user 1 in
// slot 3. The gap reduces to the horizon-4 gap evaluated at beliefs
// (p, p, T^{m-4}(initial[2])), scaled by the probability of that realization.
struct GeneralGapInstance {
    ChannelParams params;
    int horizon = 5;
    std::vector<double> initial_beliefs; // nonincreasing, size >= 3
};

double greedy_vs_tilde_gap_general(const GeneralGapInstance& instance);

// Two users, instantaneous feedback, horizon 2, equal p but r1 >= r2 and
// initial_beliefs[0] > initial_beliefs[1]. Valid on the branch where a slot-2
// NACK sends greedy to user 1: T2(initial[1]) > r1 with T2(x) = xp + (1-x)r2.
struct NonidenticalInstance {
    double p = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    std::array<double, 2> initial_beliefs{};
};

// Greedy value minus the swapped (user 1 first) value; negative means greedy
// is suboptimal.
double nonidentical_gap(const NonidenticalInstance& instance);

} // namespace arqsched
