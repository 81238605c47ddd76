#pragma once

#include "arqsched/channel.hpp"
#include "arqsched/delay.hpp"

#include <optional>
#include <vector>

namespace arqsched {

// Newest usable feedback bit for one user, keyed to the slot the packet was
// sent in. Smaller origin_slot = sent later in time (slots count down).
struct LatestFeedback {
    bool ack = false;
    int origin_slot = 0;
};

// Belief state of N users under time-stamped, randomly delayed ARQ feedback.
// Users are indexed 0..N-1. Beliefs are not stored and stepped; they are
// recomputed on demand from (bit, origin_slot), so there is no cumulative
// floating-point drift:
//   latest = (ACK, k)  -> T^{k-t-1}(p_i)
//   latest = (NACK, k) -> T^{k-t-1}(r_i)
//   never observed     -> T^{m-t}(initial_belief_i)
class BeliefTracker {
public:
    // Identical channels for all users.
    BeliefTracker(const ChannelParams& shared, std::vector<double> initial_beliefs, int horizon);
    // Per-user channels (sizes must match).
    BeliefTracker(std::vector<ChannelParams> params, std::vector<double> initial_beliefs,
                  int horizon);

    int user_count() const { return static_cast<int>(initial_.size()); }
    int horizon() const { return horizon_; }
    const ChannelParams& params(int user) const;
    double initial_belief(int user) const;
    const std::optional<LatestFeedback>& latest(int user) const;

    // P(user's channel on at slot t | its newest feedback), t in [1, m].
    double belief_at(int user, int t) const;
    std::vector<double> beliefs_at(int t) const;

    // Records one feedback bit. Accepted only if strictly newer (smaller
    // origin slot) than the user's current latest; returns whether accepted.
    bool record(int user, bool ack, int origin_slot);

    // Feeds a batch of arrived events through record(). The end state does
    // not depend on the order within the batch.
    void update_arrivals(const std::vector<FeedbackEvent>& arrived);

    // argmax_i belief_at(i, t); ties go to the lowest user index. Valid for
    // any sign of p - r.
    int greedy_user(int t) const;

private:
    std::vector<ChannelParams> params_;
    std::vector<double> initial_;
    std::vector<std::optional<LatestFeedback>> latest_;
    int horizon_;

    void validate_user(int user) const;
};

// Greedy scheduling order maintained with integer bookkeeping only, never
// evaluating the belief operator. Three queues, concatenated A then X then N:
//   A: users whose latest bit is ACK, origin ascending (head = newest ACK)
//   X: never-observed users, frozen at construction by nonincreasing
//      initial belief (their beliefs all evolve by the same T power, so the
//      order never changes)
//   N: users whose latest bit is NACK, origin descending (head = oldest NACK)
// The concatenation lists users in nonincreasing current belief whenever
// p > r and channels are identical; construction rejects p <= r.
class ScheduleOrderVector {
public:
    ScheduleOrderVector(const ChannelParams& shared, const std::vector<double>& initial_beliefs);

    int user_count() const { return static_cast<int>(latest_origin_.size()); }

    // Head of A, else head of X, else head of N.
    int decide() const;

    // Moves each arrived event's user whose bit is strictly newer than its
    // held one; stale events leave the order untouched.
    void update_arrivals(const std::vector<FeedbackEvent>& arrived);
    bool apply(int user, bool ack, int origin_slot);

    // Deterministic-delay shortcut: at most one packet arrives per slot end
    // and it is always the newest feedback in the whole system, so an ACK
    // sends its user to the very front and a NACK to the very back. Rejects
    // origins that are not system-newest (the shortcut would misplace them).
    void place_on_top(int user, int origin_slot);
    void place_at_bottom(int user, int origin_slot);

    // A users, then X, then N.
    std::vector<int> flatten() const;

private:
    struct Entry {
        int user;
        int origin;
    };

    std::vector<Entry> acked_;     // origin strictly ascending
    std::vector<int> unobserved_;  // frozen initial order
    std::vector<Entry> nacked_;    // origin strictly descending
    std::vector<int> latest_origin_; // per user; 0 = none yet
    int newest_origin_ = 0;          // min origin seen across users; 0 = none

    void remove_user(int user);
    bool strictly_newer(int user, int origin_slot) const;
};

// Decision-table case for the two-user scheduler driven by a revealed state
// pair: 0 (off,off), 1 (off,on), 2 (on,off), 3 (on,on). Case c selects user 0
// with the policy's c-th probability.
inline int alpha_case(bool user0_on, bool user1_on) {
    return (user0_on ? 2 : 0) + (user1_on ? 1 : 0);
}

} // namespace arqsched
