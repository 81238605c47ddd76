#include "arqsched/scheduler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace arqsched {

namespace {

std::vector<ChannelParams> replicate(const ChannelParams& shared, std::size_t n) {
    return std::vector<ChannelParams>(n, shared);
}

void validate_beliefs(const std::vector<double>& beliefs) {
    if (beliefs.empty()) throw std::invalid_argument("need at least one user");
    for (double x : beliefs) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument("initial beliefs must lie in [0, 1]");
        }
    }
}

} // namespace

BeliefTracker::BeliefTracker(const ChannelParams& shared, std::vector<double> initial_beliefs,
                             int horizon)
    // No std::move here: the size must be read before the other argument is
    // constructed, and the evaluation order is unspecified.
    : BeliefTracker(replicate(shared, initial_beliefs.size()), initial_beliefs, horizon) {}

BeliefTracker::BeliefTracker(std::vector<ChannelParams> params,
                             std::vector<double> initial_beliefs, int horizon)
    : params_(std::move(params)), initial_(std::move(initial_beliefs)), horizon_(horizon) {
    validate_beliefs(initial_);
    if (params_.size() != initial_.size()) {
        throw std::invalid_argument("one ChannelParams per user required");
    }
    if (horizon_ < 1) throw std::invalid_argument("horizon must be at least 1");
    latest_.resize(initial_.size());
}

void BeliefTracker::validate_user(int user) const {
    if (user < 0 || user >= user_count()) {
        throw std::out_of_range("unknown user index " + std::to_string(user));
    }
}

const ChannelParams& BeliefTracker::params(int user) const {
    validate_user(user);
    return params_[static_cast<std::size_t>(user)];
}

double BeliefTracker::initial_belief(int user) const {
    validate_user(user);
    return initial_[static_cast<std::size_t>(user)];
}

const std::optional<LatestFeedback>& BeliefTracker::latest(int user) const {
    validate_user(user);
    return latest_[static_cast<std::size_t>(user)];
}

double BeliefTracker::belief_at(int user, int t) const {
    validate_user(user);
    if (t < 1 || t > horizon_) throw std::out_of_range("slot index outside [1, m]");
    const ChannelParams& cp = params_[static_cast<std::size_t>(user)];
    const auto& fb = latest_[static_cast<std::size_t>(user)];
    if (!fb) {
        return t_operator(initial_[static_cast<std::size_t>(user)],
                          static_cast<unsigned>(horizon_ - t), cp);
    }
    // Feedback from slot k is usable only at later slots (t < k).
    if (t >= fb->origin_slot) {
        throw std::logic_error("belief queried at or before its feedback's origin slot");
    }
    const double base = fb->ack ? cp.p : cp.r;
    return t_operator(base, static_cast<unsigned>(fb->origin_slot - t - 1), cp);
}

std::vector<double> BeliefTracker::beliefs_at(int t) const {
    std::vector<double> out(static_cast<std::size_t>(user_count()));
    for (int i = 0; i < user_count(); ++i) out[static_cast<std::size_t>(i)] = belief_at(i, t);
    return out;
}

bool BeliefTracker::record(int user, bool ack, int origin_slot) {
    validate_user(user);
    if (origin_slot < 1 || origin_slot > horizon_) {
        throw std::invalid_argument("feedback origin slot outside [1, m]");
    }
    auto& fb = latest_[static_cast<std::size_t>(user)];
    if (fb && origin_slot >= fb->origin_slot) return false; // stale: carries no new information
    fb = LatestFeedback{ack, origin_slot};
    return true;
}

void BeliefTracker::update_arrivals(const std::vector<FeedbackEvent>& arrived) {
    for (const FeedbackEvent& ev : arrived) record(ev.user, ev.ack, ev.origin_slot);
}

int BeliefTracker::greedy_user(int t) const {
    int best = 0;
    double best_belief = belief_at(0, t);
    for (int i = 1; i < user_count(); ++i) {
        const double b = belief_at(i, t);
        if (b > best_belief) {
            best = i;
            best_belief = b;
        }
    }
    return best;
}

ScheduleOrderVector::ScheduleOrderVector(const ChannelParams& shared,
                                         const std::vector<double>& initial_beliefs) {
    if (!(shared.p > shared.r)) {
        throw std::invalid_argument("schedule order vector requires p > r");
    }
    validate_beliefs(initial_beliefs);
    const int n = static_cast<int>(initial_beliefs.size());
    unobserved_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) unobserved_[static_cast<std::size_t>(i)] = i;
    // Stable sort keeps equal beliefs in ascending user order.
    std::stable_sort(unobserved_.begin(), unobserved_.end(), [&](int a, int b) {
        return initial_beliefs[static_cast<std::size_t>(a)] >
               initial_beliefs[static_cast<std::size_t>(b)];
    });
    latest_origin_.assign(static_cast<std::size_t>(n), 0);
}

int ScheduleOrderVector::decide() const {
    if (!acked_.empty()) return acked_.front().user;
    if (!unobserved_.empty()) return unobserved_.front();
    return nacked_.front().user;
}

bool ScheduleOrderVector::strictly_newer(int user, int origin_slot) const {
    const int held = latest_origin_[static_cast<std::size_t>(user)];
    return held == 0 || origin_slot < held;
}

void ScheduleOrderVector::remove_user(int user) {
    auto by_user = [user](const Entry& e) { return e.user == user; };
    if (auto it = std::find_if(acked_.begin(), acked_.end(), by_user); it != acked_.end()) {
        acked_.erase(it);
        return;
    }
    if (auto it = std::find(unobserved_.begin(), unobserved_.end(), user);
        it != unobserved_.end()) {
        unobserved_.erase(it);
        return;
    }
    if (auto it = std::find_if(nacked_.begin(), nacked_.end(), by_user); it != nacked_.end()) {
        nacked_.erase(it);
    }
}

bool ScheduleOrderVector::apply(int user, bool ack, int origin_slot) {
    if (user < 0 || user >= user_count()) {
        throw std::out_of_range("unknown user index " + std::to_string(user));
    }
    if (origin_slot < 1) throw std::invalid_argument("origin slot must be at least 1");
    if (!strictly_newer(user, origin_slot)) return false;
    remove_user(user);
    latest_origin_[static_cast<std::size_t>(user)] = origin_slot;
    if (newest_origin_ == 0 || origin_slot < newest_origin_) newest_origin_ = origin_slot;
    if (ack) {
        auto pos = std::find_if(acked_.begin(), acked_.end(),
                                [origin_slot](const Entry& e) { return e.origin > origin_slot; });
        acked_.insert(pos, Entry{user, origin_slot});
    } else {
        auto pos = std::find_if(nacked_.begin(), nacked_.end(),
                                [origin_slot](const Entry& e) { return e.origin < origin_slot; });
        nacked_.insert(pos, Entry{user, origin_slot});
    }
    return true;
}

void ScheduleOrderVector::update_arrivals(const std::vector<FeedbackEvent>& arrived) {
    for (const FeedbackEvent& ev : arrived) apply(ev.user, ev.ack, ev.origin_slot);
}

void ScheduleOrderVector::place_on_top(int user, int origin_slot) {
    if (newest_origin_ != 0 && origin_slot >= newest_origin_) {
        throw std::logic_error("front placement needs the system-newest feedback");
    }
    apply(user, true, origin_slot); // lands at the head of A = head of the order
}

void ScheduleOrderVector::place_at_bottom(int user, int origin_slot) {
    if (newest_origin_ != 0 && origin_slot >= newest_origin_) {
        throw std::logic_error("back placement needs the system-newest feedback");
    }
    apply(user, false, origin_slot); // lands at the tail of N = tail of the order
}

std::vector<int> ScheduleOrderVector::flatten() const {
    std::vector<int> out;
    out.reserve(latest_origin_.size());
    for (const Entry& e : acked_) out.push_back(e.user);
    for (int u : unobserved_) out.push_back(u);
    for (const Entry& e : nacked_) out.push_back(e.user);
    return out;
}

} // namespace arqsched
