#pragma once

#include "arqsched/channel.hpp"
#include "arqsched/delay.hpp"

#include <vector>

namespace arqsched {

// One scheduling problem: N users with two-state Markov downlink channels,
// finite horizon of m slots indexed m (first) down to 1 (last), and an
// i.i.d. feedback delay shared by all users.
struct Instance {
    std::vector<ChannelParams> params;   // one per user
    std::vector<double> initial_beliefs; // P(on at slot m), one per user
    int horizon;                         // m
    DelayPmf delay;

    int user_count() const { return static_cast<int>(params.size()); }
    bool identical_params() const;

    // Throws std::invalid_argument on size mismatch or out-of-range values.
    void validate() const;

    // N identical channels with explicit initial beliefs.
    static Instance homogeneous(const ChannelParams& shared, std::vector<double> initial_beliefs,
                                int horizon, DelayPmf delay);
    // N identical channels started from the stationary on-probability.
    static Instance stationary(const ChannelParams& shared, int n_users, int horizon,
                               DelayPmf delay);
};

} // namespace arqsched
