#include "arqsched/counterexample.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace arqsched {

namespace {

void check_beliefs_nonincreasing(const double* beliefs, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        if (!(beliefs[i] >= 0.0) || !(beliefs[i] <= 1.0) || !std::isfinite(beliefs[i])) {
            throw std::invalid_argument("initial beliefs must lie in [0, 1]");
        }
        if (i > 0 && beliefs[i] > beliefs[i - 1]) {
            throw std::invalid_argument("initial beliefs must be nonincreasing");
        }
    }
}

void check_m4(const M4Instance& instance) {
    if (!(instance.params.p > instance.params.r)) {
        throw std::invalid_argument("counterexample requires positively correlated channels (p > r)");
    }
    check_beliefs_nonincreasing(instance.initial_beliefs.data(), instance.initial_beliefs.size());
}

int argmax_belief(const std::array<double, 3>& beliefs) {
    int best = 0;
    for (int u = 1; u < 3; ++u) {
        if (beliefs[u] > beliefs[best]) best = u;
    }
    return best;
}

// One branch of the horizon-4 walk. `a4`/`a3` are the first two decisions
// (fixed by the policy under audit); f4 and f3 are the revealed bits of those
// two scheduled users. Decisions in slots 2 and 1 come from usable-feedback
// beliefs (delay 1: the slot-k bit is usable from slot k-2 on); rewards are
// expectations conditional on both branch bits.
M4BranchRow m4_branch(const M4Instance& instance, int a4, int a3, bool f4, bool f3) {
    const ChannelParams& cp = instance.params;
    const std::array<double, 3>& pi = instance.initial_beliefs;

    M4BranchRow row;
    row.f4 = f4;
    row.f3 = f3;

    const double prob_f4 = f4 ? pi[static_cast<std::size_t>(a4)]
                              : 1.0 - pi[static_cast<std::size_t>(a4)];
    double prob_f3_on;
    if (a3 == a4) {
        prob_f3_on = f4 ? cp.p : cp.r; // same chain, one step
    } else {
        prob_f3_on = t_operator(pi[static_cast<std::size_t>(a3)], 1, cp);
    }
    row.probability = prob_f4 * (f3 ? prob_f3_on : 1.0 - prob_f3_on);

    const double bit4 = f4 ? 1.0 : 0.0;
    const double bit3 = f3 ? 1.0 : 0.0;

    // Newest conditioned bit per user, as (value at its slot, slot index).
    // Slot-3 bit supersedes the slot-4 bit when both belong to one user.
    auto conditional_mean = [&](int user, int slot) {
        if (user == a3) return t_operator(bit3, static_cast<unsigned>(3 - slot), cp);
        if (user == a4) return t_operator(bit4, static_cast<unsigned>(4 - slot), cp);
        return t_operator(pi[static_cast<std::size_t>(user)], static_cast<unsigned>(4 - slot), cp);
    };

    double reward = bit4 + bit3;

    // Slot 2: only the slot-4 bit has arrived.
    std::array<double, 3> bel2;
    for (int u = 0; u < 3; ++u) {
        bel2[static_cast<std::size_t>(u)] =
            (u == a4) ? t_operator(bit4, 2, cp)
                      : t_operator(pi[static_cast<std::size_t>(u)], 2, cp);
    }
    const int a2 = argmax_belief(bel2);
    reward += conditional_mean(a2, 2);

    // Slot 1: both bits have arrived, so beliefs equal conditional means.
    std::array<double, 3> bel1;
    for (int u = 0; u < 3; ++u) bel1[static_cast<std::size_t>(u)] = conditional_mean(u, 1);
    const int a1 = argmax_belief(bel1);
    reward += bel1[static_cast<std::size_t>(a1)];

    row.actions = {a2, a1};
    row.expected_reward = reward;
    return row;
}

} // namespace

double greedy_vs_tilde_gap_m4(const M4Instance& instance) {
    check_m4(instance);
    const double p = instance.params.p;
    const double r = instance.params.r;
    const double eta = p - r;
    const std::array<double, 3>& pi = instance.initial_beliefs;
    return eta * (pi[1] - pi[0] +
                  eta * eta * (1.0 - pi[0]) * pi[2] * (1.0 - r - eta * pi[1]));
}

M4Enumeration m4_enumerate(const M4Instance& instance) {
    check_m4(instance);
    M4Enumeration out;
    const std::array<std::array<bool, 2>, 4> branches = {{
        {true, true}, {true, false}, {false, true}, {false, false}}};
    for (const auto& [f4, f3] : branches) {
        M4BranchRow greedy = m4_branch(instance, 0, 0, f4, f3);
        M4BranchRow tilde = m4_branch(instance, 0, 1, f4, f3);
        out.greedy_total += greedy.probability * greedy.expected_reward;
        out.tilde_total += tilde.probability * tilde.expected_reward;
        out.greedy_rows.push_back(greedy);
        out.tilde_rows.push_back(tilde);
    }
    out.gap = out.tilde_total - out.greedy_total;
    return out;
}

double greedy_vs_tilde_gap_general(const GeneralGapInstance& instance) {
    if (instance.horizon == 4) {
        throw std::invalid_argument(
            "horizon 4 has its own closed form; use greedy_vs_tilde_gap_m4");
    }
    if (instance.horizon < 5) {
        throw std::invalid_argument("general gap requires horizon >= 5");
    }
    if (instance.initial_beliefs.size() < 3) {
        throw std::invalid_argument("general gap requires at least 3 users");
    }
    if (!(instance.params.p > instance.params.r)) {
        throw std::invalid_argument("counterexample requires positively correlated channels (p > r)");
    }
    check_beliefs_nonincreasing(instance.initial_beliefs.data(), instance.initial_beliefs.size());

    const double p = instance.params.p;
    const double r = instance.params.r;
    const double eta = p - r;
    const unsigned hold = static_cast<unsigned>(instance.horizon - 5);

    // Probability that greedy pings users 0 and 1 alternately from slot m
    // down to slot 5 and sees only ACKs: each user is drawn initially, then
    // held through m-5 further steps.
    const double prob_r1 = instance.initial_beliefs[0] * std::pow(p, static_cast<double>(hold)) *
                           instance.initial_beliefs[1] * std::pow(p, static_cast<double>(hold));

    // On that event the last four slots replay the horizon-4 instance with
    // beliefs (p, p, T^{m-4}(initial[2])); only the third-user term survives.
    const double drift3 =
        t_operator(instance.initial_beliefs[2], static_cast<unsigned>(instance.horizon - 4),
                   instance.params);
    return prob_r1 * eta * eta * eta * (1.0 - p) * drift3 * (1.0 - r - eta * p);
}

double nonidentical_gap(const NonidenticalInstance& instance) {
    // Channel validation doubles as degenerate-parameter rejection.
    ChannelParams first(instance.p, instance.r1);
    ChannelParams second(instance.p, instance.r2);
    if (!(instance.p > instance.r1) || !(instance.r1 >= instance.r2)) {
        throw std::invalid_argument("nonidentical gap requires p > r1 >= r2");
    }
    const double pi1 = instance.initial_beliefs[0];
    const double pi2 = instance.initial_beliefs[1];
    if (!(pi1 >= 0.0) || !(pi1 <= 1.0) || !(pi2 >= 0.0) || !(pi2 <= 1.0)) {
        throw std::invalid_argument("initial beliefs must lie in [0, 1]");
    }
    if (!(pi1 > pi2)) {
        throw std::invalid_argument("nonidentical gap requires initial_beliefs[0] > initial_beliefs[1]");
    }
    // After a slot-2 NACK greedy must still prefer user 1 in slot 1, i.e. the
    // user-1 belief advanced by its own chain must beat r1.
    const double advanced = t_operator(pi2, 1, second);
    if (!(advanced > instance.r1)) {
        throw std::invalid_argument(
            "instance outside the analyzed branch: T2(initial_beliefs[1]) must exceed r1");
    }
    (void)first;
    return (pi1 - pi2) - (instance.r1 - instance.r2) * (1.0 - pi1) * (1.0 - pi2);
}

} // namespace arqsched
