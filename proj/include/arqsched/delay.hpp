#pragma once

#include "arqsched/rng.hpp"

#include <string_view>
#include <vector>

namespace arqsched {

// Finite-support pmf of the feedback delay D, entries [P(D=0), ..., P(D=d_max)].
// Entries must be nonnegative and sum to 1 within 1e-12; support is capped at
// d_max <= 64. Delays are i.i.d. across users and slots.
class DelayPmf {
public:
    explicit DelayPmf(std::vector<double> probs);

    // Parses a comma-separated list such as "0.5,0.5".
    static DelayPmf parse(std::string_view text);

    // All mass on a single delay d >= 0.
    static DelayPmf point_mass(int d);

    int max_delay() const { return static_cast<int>(probs_.size()) - 1; }
    const std::vector<double>& probs() const { return probs_; }

    double prob(int d) const;        // P(D = d), zero outside the support
    double cdf_at_most(int d) const; // P(D <= d), monotone nondecreasing
    double tail_beyond(int d) const; // P(D > d), monotone nonincreasing

    // P(D = age | D >= age); 1 when P(D >= age) = 0 so pending feedback can
    // never outlive the support.
    double hazard(int age) const;

    // One delay value, consuming exactly one uniform draw (CDF inversion).
    int sample(Rng& rng) const;

    bool deterministic() const; // all mass on a single delay
    int deterministic_delay() const; // that delay; throws unless deterministic
    std::string text() const;   // canonical comma-separated form

private:
    std::vector<double> probs_;
    std::vector<double> cdf_; // cdf_[d] = P(D <= d)
};

// Feedback packet in flight. Slots are indexed m (first) down to 1 (last), so
// a packet sent in slot k with delay d arrives at the end of slot k - d and is
// usable from slot k - d - 1 on. arrival_slot < 1 means it never arrives
// within the horizon.
struct FeedbackEvent {
    int user = 0;
    int origin_slot = 0;
    bool ack = false;
    int arrival_slot = 0;

    static FeedbackEvent make(int user, int origin_slot, bool ack, int delay);
};

// Distribution of the freshness lag l of the most recent feedback available
// after `elapsed` observed slots: the newest packet originates l + 1 slots
// before the current one. P(l) = P(D <= l) * prod_{j<l} P(D > j) for
// 0 <= l < elapsed, and P(none) = prod_{j<elapsed} P(D > j).
struct FreshnessPmf {
    std::vector<double> lag_probs; // index l in [0, elapsed)
    double none_prob = 1.0;

    int elapsed() const { return static_cast<int>(lag_probs.size()); }
    double total() const;
};

FreshnessPmf freshness_pmf(const DelayPmf& pmf, int elapsed);

int sample_delay(const DelayPmf& pmf, Rng& rng);

// Splits in-flight events into those arriving at the end of `slot` and those
// still pending. Relative order is preserved in both outputs.
struct ArrivalSplit {
    std::vector<FeedbackEvent> arrived;
    std::vector<FeedbackEvent> pending;
};

ArrivalSplit arrivals_at_slot_end(const std::vector<FeedbackEvent>& in_flight, int slot);

} // namespace arqsched
