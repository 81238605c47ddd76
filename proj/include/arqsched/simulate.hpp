#pragma once

#include "arqsched/problem.hpp"
#include "arqsched/rng.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace arqsched {

// What the scheduler gets to observe. Under arq, each transmission generates
// one delayed (ACK/NACK, origin) bit for the scheduled user. Under genie, each
// slot emits one delayed packet carrying every user's state in that slot,
// regardless of who was scheduled.
enum class ObservationMode { arq, genie };

std::string to_string(ObservationMode mode);
ObservationMode parse_observation_mode(std::string_view text);

// Runtime policy selector. Text forms:
//   greedy            schedule the highest current belief (ties: lowest index)
//   greedy-queue      same decisions via the constant-time schedule order
//                     vector; arq mode, identical channels with p > r only
//   random            uniform over users, one policy draw per slot
//   fixed:<i>         always user i (0-based)
//   alpha:<a0,a1,a2,a3>  two-user genie rule under deterministic delay d:
//                     reads the revealed state pair of slot t+d+1 and picks
//                     user 0 with probability a[case], case as in alpha_case()
struct PolicySpec {
    enum class Kind { greedy, greedy_queue, random_uniform, fixed, alpha };

    Kind kind = Kind::greedy;
    int fixed_user = 0;
    std::array<double, 4> alpha{{0.0, 0.0, 0.0, 0.0}};

    static PolicySpec parse(std::string_view text);
    std::string text() const;
};

struct EpisodeResult {
    double total = 0.0;
    std::vector<int> decisions;  // index 0 = first slot (t = m)
    std::vector<bool> successes; // scheduled user's channel was on
};

// One episode on externally supplied streams. The channel stream is consumed
// in a fixed pattern independent of the policy and the observation mode:
// N initial-state draws, then per slot one delay draw followed by N transition
// draws (skipped after the last slot). greedy and greedy-queue never touch the
// policy stream, so runs differing only in those policies see identical
// channel realizations, slot by slot.
EpisodeResult run_episode(const Instance& instance, ObservationMode mode, const PolicySpec& policy,
                          Rng& channel_rng, Rng& policy_rng);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;          // sqrt(sample variance / episodes); 0 for one episode
    std::vector<double> per_slot;    // mean success rate per slot, index 0 = t = m
    std::uint64_t episodes = 0;
};

// Monte Carlo estimate over independent episodes; episode e uses the streams
// episode_rng(seed, e) for the channel and episode_rng(seed, e, 1) for the
// policy, so the estimate is reproducible and independent of batching.
McEstimate simulate_policy(const Instance& instance, ObservationMode mode,
                           const PolicySpec& policy, std::uint64_t episodes, std::uint64_t seed);

} // namespace arqsched
