#include "arqsched/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace arqsched {

namespace {

void check_probability(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " +
                                    std::to_string(value));
    }
}

} // namespace

ChannelParams::ChannelParams(double p_on_given_on, double r_on_given_off)
    : p(p_on_given_on), r(r_on_given_off) {
    check_probability(p, "p");
    check_probability(r, "r");
    if (p == 1.0 && r == 0.0) {
        throw std::invalid_argument("p = 1 with r = 0 has no unique stationary distribution");
    }
}

double steady_state(const ChannelParams& params) {
    return params.r / (1.0 - (params.p - params.r));
}

double memory_pow(const ChannelParams& params, unsigned u) {
    double result = 1.0;
    double base = params.memory();
    while (u != 0) {
        if (u & 1u) result *= base;
        base *= base;
        u >>= 1u;
    }
    return result;
}

double t_operator(double x, unsigned u, const ChannelParams& params) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("belief outside [0, 1]: " + std::to_string(x));
    }
    if (u == 0) return x; // exact identity, not ps + 1.0 * (x - ps)
    const double ps = steady_state(params);
    double value = ps + memory_pow(params, u) * (x - ps);
    // Floating-point spill from the affine form stays within accumulated
    // rounding; anything beyond 1e-12 would be a logic error upstream.
    if (value < 0.0) {
        if (value < -1e-12) throw std::logic_error("t_operator spill below 0");
        value = 0.0;
    } else if (value > 1.0) {
        if (value > 1.0 + 1e-12) throw std::logic_error("t_operator spill above 1");
        value = 1.0;
    }
    return value;
}

ChannelState transition(ChannelState state, const ChannelParams& params, Rng& rng) {
    const double on_prob = state == ChannelState::on ? params.p : params.r;
    return rng.next_unit() < on_prob ? ChannelState::on : ChannelState::off;
}

} // namespace arqsched
