#pragma once

#include "arqsched/rng.hpp"

namespace arqsched {

enum class ChannelState : int { off = 0, on = 1 };

enum class Correlation { positive, memoryless, negative };

// Two-state Markov channel. p = P(on this slot | on previous slot),
// r = P(on this slot | off previous slot). The pair p = 1, r = 0 (two
// absorbing states, no unique stationary law) is rejected; everything else in
// the unit square is legal, including p = r (memoryless) and p < r
// (negatively correlated).
struct ChannelParams {
    double p;
    double r;

    ChannelParams(double p_on_given_on, double r_on_given_off);

    double memory() const { return p - r; }
    Correlation correlation() const {
        if (p > r) return Correlation::positive;
        if (p < r) return Correlation::negative;
        return Correlation::memoryless;
    }
};

// Stationary probability of the on state: r / (1 - (p - r)).
double steady_state(const ChannelParams& params);

// u-step belief evolution T^u(x) = p_s + (p - r)^u (x - p_s), the closed form
// of x -> x p + (1 - x) r applied u times. T^0 is the identity. x must lie in
// [0, 1]; the result is clamped only to absorb floating-point spill within
// 1e-12, never to hide logic errors.
double t_operator(double x, unsigned u, const ChannelParams& params);

// One-slot state transition, consuming exactly one uniform draw.
ChannelState transition(ChannelState state, const ChannelParams& params, Rng& rng);

// (p - r)^u by repeated multiplication; exact for u = 0 even when p = r.
double memory_pow(const ChannelParams& params, unsigned u);

} // namespace arqsched
