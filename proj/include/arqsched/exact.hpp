#pragma once

#include "arqsched/problem.hpp"
#include "arqsched/scheduler.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace arqsched {

// Decision-time view of the information state, handed to custom policy
// callbacks. The engine may relabel users within groups sharing identical
// (params, initial belief); such relabelings never change beliefs or values,
// and a custom rule must be a function of this view only.
struct InfoView {
    int slot;
    const std::vector<double>& beliefs;
    const std::vector<std::optional<LatestFeedback>>& latest;
};

struct EnginePolicy {
    enum class Kind { optimal, greedy, random_uniform, fixed, custom };

    Kind kind = Kind::greedy;
    int fixed_user = 0;
    std::function<int(const InfoView&)> decide; // Kind::custom only

    static EnginePolicy optimal() { return {Kind::optimal, 0, {}}; }
    static EnginePolicy greedy() { return {Kind::greedy, 0, {}}; }
    static EnginePolicy random_uniform() { return {Kind::random_uniform, 0, {}}; }
    static EnginePolicy fixed(int user) { return {Kind::fixed, user, {}}; }
    static EnginePolicy custom(std::function<int(const InfoView&)> rule) {
        return {Kind::custom, 0, std::move(rule)};
    }
    std::string label() const;
};

// Size guard for the exact evaluators. The defaults keep runs in the
// comfortably-fast range; raising them is allowed up to the hard encoding
// caps N <= 6, m <= 16, d_max <= 3.
struct ExactLimits {
    int max_users = 4;
    int max_horizon = 8;
    int max_delay = 3;
};

struct ExactResult {
    double total = 0.0;
    // Expected reward per slot, index 0 = first slot (t = m). Sums to total.
    // Under Kind::optimal, ties between equally good actions are attributed
    // to the first maximizer; the total is tie-independent.
    std::vector<double> per_slot;
};

// Exact expected total reward under per-user ARQ feedback: expectimax over
// the canonicalized information-state graph. The information state keeps,
// per user, the newest revealed (bit, origin) plus the in-flight packets
// newer than it; arrivals branch with the delay hazard, revealed bits with
// the user's own Markov law bridged over unrevealed slots.
ExactResult exact_value(const Instance& instance, const EnginePolicy& policy,
                        const ExactLimits& limits = {});

// Same recursion in genie observation mode: every slot emits one packet
// carrying all users' states for that slot, delayed by the same law,
// regardless of the action taken.
ExactResult exact_genie_value(const Instance& instance, const EnginePolicy& policy,
                              const ExactLimits& limits = {});

// Full-path view for realization-conditional policies: the callback may read
// the entire realized state matrix in addition to the revealed feedback.
struct PathView {
    int slot;
    const std::vector<std::vector<ChannelState>>& states; // [user][t - 1]
    const BeliefTracker& tracker;
};
using PathPolicy = std::function<int(const PathView&)>;

// Exact value by enumerating all 2^(N*m) joint channel paths, weighting each
// by its probability. Deterministic delay only (feedback is then a function
// of the path). Guarded at N*m <= 22.
double path_enumeration_value(const Instance& instance, const PathPolicy& policy);

} // namespace arqsched
