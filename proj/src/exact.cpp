#include "arqsched/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace arqsched {

namespace {

constexpr int hard_max_users = 6;
constexpr int hard_max_horizon = 16;
constexpr int hard_max_delay = 3;

// Per-user information record. lag = origin - t - 1 of the newest revealed
// bit; pending bit i set = a packet of this user, aged i+1 slots, is still in
// flight. Invariant: pending packets are strictly newer than the revealed
// origin (stale ones are dropped the moment they would arrive or be kept).
struct UserRecord {
    bool has = false;
    bool ack = false;
    int lag = 0;
    unsigned pending = 0;
};

constexpr std::uint32_t record_bits = 9;

std::uint32_t encode_record(const UserRecord& u) {
    return (u.has ? 1u : 0u) | ((u.ack ? 1u : 0u) << 1) |
           (static_cast<std::uint32_t>(u.lag) << 2) | (u.pending << 6);
}

UserRecord decode_record(std::uint32_t bits) {
    UserRecord u;
    u.has = bits & 1u;
    u.ack = (bits >> 1) & 1u;
    u.lag = static_cast<int>((bits >> 2) & 0xFu);
    u.pending = (bits >> 6) & 0x7u;
    return u;
}

using State = std::vector<UserRecord>;

struct InFlightItem {
    int user; // -1 marks the shared genie packet stream
    int age;  // slots since origin; tested against hazard(age) this slot end
};

void check_limits(const Instance& inst, const ExactLimits& limits) {
    inst.validate();
    const int n = inst.user_count();
    const int m = inst.horizon;
    const int dmax = inst.delay.max_delay();
    if (n > hard_max_users || m > hard_max_horizon || dmax > hard_max_delay) {
        throw std::invalid_argument("exact evaluator hard caps exceeded (N <= " +
                                    std::to_string(hard_max_users) + ", m <= " +
                                    std::to_string(hard_max_horizon) + ", d_max <= " +
                                    std::to_string(hard_max_delay) + ")");
    }
    if (n > limits.max_users || m > limits.max_horizon || dmax > limits.max_delay) {
        double per_user = (1.0 + 2.0 * (m - 1)) * static_cast<double>(1u << std::min(dmax, 3));
        double estimate = m;
        for (int i = 0; i < n; ++i) estimate *= per_user;
        throw std::invalid_argument(
            "instance exceeds exact-evaluator limits (N=" + std::to_string(n) + ", m=" +
            std::to_string(m) + ", d_max=" + std::to_string(dmax) + "); roughly " +
            std::to_string(static_cast<long long>(estimate)) +
            " information states; raise ExactLimits explicitly to proceed");
    }
}

// Expectimax over ARQ information states.
class ArqEngine {
public:
    ArqEngine(const Instance& inst, const EnginePolicy& policy)
        : inst_(inst), policy_(policy), n_(inst.user_count()), dmax_(inst.delay.max_delay()),
          canonical_(policy.kind == EnginePolicy::Kind::optimal ||
                     policy.kind == EnginePolicy::Kind::random_uniform) {
        build_groups();
        memo_.reserve(1u << 16);
    }

    ExactResult run() {
        State init(static_cast<std::size_t>(n_));
        canonicalize(init);
        ExactResult out;
        out.total = value(init, inst_.horizon);
        out.per_slot = per_slot_breakdown();
        return out;
    }

private:
    const Instance& inst_;
    const EnginePolicy& policy_;
    int n_;
    int dmax_;
    bool canonical_;
    std::vector<std::vector<int>> groups_; // user positions with identical (params, pi)
    std::unordered_map<std::uint64_t, double> memo_;

    void build_groups() {
        std::vector<int> owner(static_cast<std::size_t>(n_), -1);
        for (int i = 0; i < n_; ++i) {
            if (owner[static_cast<std::size_t>(i)] >= 0) continue;
            groups_.emplace_back(1, i);
            owner[static_cast<std::size_t>(i)] = static_cast<int>(groups_.size()) - 1;
            for (int j = i + 1; j < n_; ++j) {
                if (owner[static_cast<std::size_t>(j)] >= 0) continue;
                const bool same = inst_.params[static_cast<std::size_t>(i)].p ==
                                      inst_.params[static_cast<std::size_t>(j)].p &&
                                  inst_.params[static_cast<std::size_t>(i)].r ==
                                      inst_.params[static_cast<std::size_t>(j)].r &&
                                  inst_.initial_beliefs[static_cast<std::size_t>(i)] ==
                                      inst_.initial_beliefs[static_cast<std::size_t>(j)];
                if (same) {
                    groups_.back().push_back(j);
                    owner[static_cast<std::size_t>(j)] = owner[static_cast<std::size_t>(i)];
                }
            }
        }
    }

    // Sorting records within exchangeable groups merges states that differ
    // only by relabeling indistinguishable users. Sound only for policies
    // whose value is invariant under that relabeling (optimal, uniform
    // random); greedy tie-breaks, fixed, and custom rules reference original
    // user indices and must evaluate on raw records.
    void canonicalize(State& s) const {
        if (!canonical_) return;
        std::vector<std::uint32_t> codes;
        for (const auto& group : groups_) {
            if (group.size() < 2) continue;
            codes.clear();
            for (int u : group) codes.push_back(encode_record(s[static_cast<std::size_t>(u)]));
            std::sort(codes.begin(), codes.end());
            for (std::size_t i = 0; i < group.size(); ++i) {
                s[static_cast<std::size_t>(group[i])] = decode_record(codes[i]);
            }
        }
    }

    std::uint64_t encode(const State& s, int t) const {
        std::uint64_t key = static_cast<std::uint64_t>(t);
        for (int u = 0; u < n_; ++u) {
            key |= static_cast<std::uint64_t>(encode_record(s[static_cast<std::size_t>(u)]))
                   << (5 + record_bits * static_cast<std::uint32_t>(u));
        }
        return key;
    }

    State decode(std::uint64_t key) const {
        State s(static_cast<std::size_t>(n_));
        for (int u = 0; u < n_; ++u) {
            s[static_cast<std::size_t>(u)] = decode_record(
                static_cast<std::uint32_t>(key >> (5 + record_bits * static_cast<std::uint32_t>(u))) &
                0x1FFu);
        }
        return s;
    }

    std::vector<double> beliefs_of(const State& s, int t) const {
        std::vector<double> out(static_cast<std::size_t>(n_));
        for (int u = 0; u < n_; ++u) {
            const UserRecord& rec = s[static_cast<std::size_t>(u)];
            const ChannelParams& cp = inst_.params[static_cast<std::size_t>(u)];
            out[static_cast<std::size_t>(u)] =
                rec.has ? t_operator(rec.ack ? cp.p : cp.r, static_cast<unsigned>(rec.lag), cp)
                        : t_operator(inst_.initial_beliefs[static_cast<std::size_t>(u)],
                                     static_cast<unsigned>(inst_.horizon - t), cp);
        }
        return out;
    }

    int decide(const State& s, int t, const std::vector<double>& beliefs) const {
        switch (policy_.kind) {
        case EnginePolicy::Kind::greedy: {
            int best = 0;
            for (int u = 1; u < n_; ++u) {
                if (beliefs[static_cast<std::size_t>(u)] > beliefs[static_cast<std::size_t>(best)])
                    best = u;
            }
            return best;
        }
        case EnginePolicy::Kind::fixed:
            if (policy_.fixed_user < 0 || policy_.fixed_user >= n_) {
                throw std::invalid_argument("fixed-user policy index out of range");
            }
            return policy_.fixed_user;
        case EnginePolicy::Kind::custom: {
            std::vector<std::optional<LatestFeedback>> latest(static_cast<std::size_t>(n_));
            for (int u = 0; u < n_; ++u) {
                const UserRecord& rec = s[static_cast<std::size_t>(u)];
                if (rec.has) {
                    latest[static_cast<std::size_t>(u)] = LatestFeedback{rec.ack, t + rec.lag + 1};
                }
            }
            const int a = policy_.decide(InfoView{t, beliefs, latest});
            if (a < 0 || a >= n_) throw std::out_of_range("custom policy returned a bad user");
            return a;
        }
        default:
            throw std::logic_error("decide() called for a non-deterministic policy");
        }
    }

    // Expected future value of (state, t), memoized on the canonical key.
    double value(const State& s, int t) {
        const std::uint64_t key = encode(s, t);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const std::vector<double> beliefs = beliefs_of(s, t);
        double v = 0.0;
        switch (policy_.kind) {
        case EnginePolicy::Kind::optimal: {
            v = -1.0;
            for (int a = 0; a < n_; ++a) v = std::max(v, action_value(s, t, a, beliefs));
            break;
        }
        case EnginePolicy::Kind::random_uniform: {
            for (int a = 0; a < n_; ++a) v += action_value(s, t, a, beliefs);
            v /= n_;
            break;
        }
        default:
            v = action_value(s, t, decide(s, t, beliefs), beliefs);
        }
        memo_.emplace(key, v);
        return v;
    }

    double action_value(const State& s, int t, int action, const std::vector<double>& beliefs) {
        double q = beliefs[static_cast<std::size_t>(action)];
        if (t > 1) {
            for (const auto& [child, prob] : transitions(s, t, action)) {
                q += prob * value(decode(child), t - 1);
            }
        }
        return q;
    }

    // Canonical successor distribution at slot end: which in-flight packets
    // arrive (independent hazards) and, for each user whose newest arrival is
    // informative, the revealed bit (Markov law bridged from the previous
    // revealed bit, or from the initial belief).
    std::vector<std::pair<std::uint64_t, double>> transitions(const State& s, int t, int action) {
        items_.clear();
        for (int u = 0; u < n_; ++u) {
            const unsigned pending = s[static_cast<std::size_t>(u)].pending;
            for (int age = 1; age <= dmax_; ++age) {
                if (pending & (1u << (age - 1))) items_.push_back({u, age});
            }
        }
        items_.push_back({action, 0});
        out_.clear();
        enumerate_arrivals(s, t, 0, 0u, 1.0);
        return out_;
    }

    void enumerate_arrivals(const State& s, int t, std::size_t idx, unsigned arrived_mask,
                            double prob) {
        if (prob == 0.0) return;
        if (idx < items_.size()) {
            const double h = inst_.delay.hazard(items_[idx].age);
            enumerate_arrivals(s, t, idx + 1, arrived_mask | (1u << idx), prob * h);
            enumerate_arrivals(s, t, idx + 1, arrived_mask, prob * (1.0 - h));
            return;
        }
        // Build the slot-(t-1) state skeleton and collect bit branches.
        State next(static_cast<std::size_t>(n_));
        std::array<int, hard_max_users> newest;
        newest.fill(-1);
        std::array<unsigned, hard_max_users> survivors{};
        for (std::size_t i = 0; i < items_.size(); ++i) {
            const auto [u, age] = items_[i];
            if (arrived_mask & (1u << i)) {
                if (newest[static_cast<std::size_t>(u)] < 0 ||
                    age < newest[static_cast<std::size_t>(u)]) {
                    newest[static_cast<std::size_t>(u)] = age;
                }
            } else {
                survivors[static_cast<std::size_t>(u)] |= 1u << age; // age+1 at t-1 => bit age
            }
        }
        branch_users_.clear();
        for (int u = 0; u < n_; ++u) {
            const UserRecord& rec = s[static_cast<std::size_t>(u)];
            UserRecord& nxt = next[static_cast<std::size_t>(u)];
            const int a_min = newest[static_cast<std::size_t>(u)];
            if (a_min < 0) {
                nxt = rec;
                if (nxt.has) ++nxt.lag;
                nxt.pending = survivors[static_cast<std::size_t>(u)];
            } else {
                const ChannelParams& cp = inst_.params[static_cast<std::size_t>(u)];
                double p_on;
                if (rec.has) {
                    // k_old - k_new transitions between the two revealed slots.
                    const unsigned steps = static_cast<unsigned>(rec.lag + 1 - a_min);
                    p_on = t_operator(rec.ack ? 1.0 : 0.0, steps, cp);
                } else {
                    const int k_new = t + a_min;
                    p_on = t_operator(inst_.initial_beliefs[static_cast<std::size_t>(u)],
                                      static_cast<unsigned>(inst_.horizon - k_new), cp);
                }
                nxt.has = true;
                nxt.lag = a_min; // origin - (t-1) - 1
                // Survivor at bit b has origin t+b; keep only those strictly
                // newer than the revealed origin t+a_min.
                nxt.pending =
                    survivors[static_cast<std::size_t>(u)] & ((1u << a_min) - 1u);
                branch_users_.push_back({u, p_on});
            }
        }
        emit_bit_branches(next, t, 0, prob);
    }

    void emit_bit_branches(State& next, int t, std::size_t idx, double prob) {
        if (prob == 0.0) return;
        if (idx == branch_users_.size()) {
            State child = next;
            canonicalize(child);
            const std::uint64_t key = encode(child, t - 1);
            for (auto& kv : out_) {
                if (kv.first == key) {
                    kv.second += prob;
                    return;
                }
            }
            out_.emplace_back(key, prob);
            return;
        }
        const auto [u, p_on] = branch_users_[idx];
        next[static_cast<std::size_t>(u)].ack = true;
        emit_bit_branches(next, t, idx + 1, prob * p_on);
        next[static_cast<std::size_t>(u)].ack = false;
        emit_bit_branches(next, t, idx + 1, prob * (1.0 - p_on));
    }

    // Forward pass over the reachable state distribution, reusing the memo to
    // resolve optimal actions, to attribute the total to individual slots.
    std::vector<double> per_slot_breakdown() {
        std::vector<double> per_slot(static_cast<std::size_t>(inst_.horizon), 0.0);
        State init(static_cast<std::size_t>(n_));
        canonicalize(init);
        std::vector<std::pair<std::uint64_t, double>> dist{{encode(init, inst_.horizon), 1.0}};
        std::unordered_map<std::uint64_t, double> next;
        for (int t = inst_.horizon; t >= 1; --t) {
            next.clear();
            std::sort(dist.begin(), dist.end()); // fixed accumulation order
            for (const auto& [key, prob] : dist) {
                const State s = decode(key);
                const std::vector<double> beliefs = beliefs_of(s, t);
                actions_.clear();
                switch (policy_.kind) {
                case EnginePolicy::Kind::optimal: {
                    int best = 0;
                    double best_q = action_value(s, t, 0, beliefs);
                    for (int a = 1; a < n_; ++a) {
                        const double q = action_value(s, t, a, beliefs);
                        if (q > best_q) {
                            best = a;
                            best_q = q;
                        }
                    }
                    actions_.push_back({best, 1.0});
                    break;
                }
                case EnginePolicy::Kind::random_uniform:
                    for (int a = 0; a < n_; ++a) actions_.push_back({a, 1.0 / n_});
                    break;
                default:
                    actions_.push_back({decide(s, t, beliefs), 1.0});
                }
                for (const auto& [a, w] : actions_) {
                    per_slot[static_cast<std::size_t>(inst_.horizon - t)] +=
                        prob * w * beliefs[static_cast<std::size_t>(a)];
                    if (t > 1) {
                        for (const auto& [child, cp] : transitions(s, t, a)) {
                            next[child] += prob * w * cp;
                        }
                    }
                }
            }
            dist.assign(next.begin(), next.end());
        }
        return per_slot;
    }

    std::vector<InFlightItem> items_;
    std::vector<std::pair<std::uint64_t, double>> out_;
    std::vector<std::pair<int, double>> branch_users_;
    std::vector<std::pair<int, double>> actions_;
};

// Genie observation mode: one shared packet per slot carrying every user's
// state. The global record is (lag, bit vector) of the newest revealed packet
// plus the ages of in-flight packets newer than it.
class GenieEngine {
public:
    GenieEngine(const Instance& inst, const EnginePolicy& policy)
        : inst_(inst), policy_(policy), n_(inst.user_count()), dmax_(inst.delay.max_delay()) {
        memo_.reserve(1u << 12);
    }

    ExactResult run() {
        ExactResult out;
        out.total = value(empty_key(inst_.horizon), inst_.horizon);
        out.per_slot = per_slot_breakdown();
        return out;
    }

private:
    struct GState {
        bool has = false;
        int lag = 0;
        unsigned bits = 0; // user u's revealed state in bit u
        unsigned pending = 0;
    };

    const Instance& inst_;
    const EnginePolicy& policy_;
    int n_;
    int dmax_;
    std::unordered_map<std::uint64_t, double> memo_;

    static std::uint64_t encode(const GState& g, int t) {
        return static_cast<std::uint64_t>(t) | (static_cast<std::uint64_t>(g.has) << 5) |
               (static_cast<std::uint64_t>(g.lag) << 6) | (static_cast<std::uint64_t>(g.bits) << 10) |
               (static_cast<std::uint64_t>(g.pending) << 16);
    }

    static GState decode(std::uint64_t key) {
        GState g;
        g.has = (key >> 5) & 1u;
        g.lag = static_cast<int>((key >> 6) & 0xFu);
        g.bits = static_cast<unsigned>((key >> 10) & 0x3Fu);
        g.pending = static_cast<unsigned>((key >> 16) & 0x7u);
        return g;
    }

    std::uint64_t empty_key(int t) const { return encode(GState{}, t); }

    std::vector<double> beliefs_of(const GState& g, int t) const {
        std::vector<double> out(static_cast<std::size_t>(n_));
        for (int u = 0; u < n_; ++u) {
            const ChannelParams& cp = inst_.params[static_cast<std::size_t>(u)];
            out[static_cast<std::size_t>(u)] =
                g.has ? t_operator((g.bits >> u) & 1u ? cp.p : cp.r, static_cast<unsigned>(g.lag),
                                   cp)
                      : t_operator(inst_.initial_beliefs[static_cast<std::size_t>(u)],
                                   static_cast<unsigned>(inst_.horizon - t), cp);
        }
        return out;
    }

    int decide(const GState& g, int t, const std::vector<double>& beliefs) const {
        switch (policy_.kind) {
        case EnginePolicy::Kind::greedy: {
            int best = 0;
            for (int u = 1; u < n_; ++u) {
                if (beliefs[static_cast<std::size_t>(u)] > beliefs[static_cast<std::size_t>(best)])
                    best = u;
            }
            return best;
        }
        case EnginePolicy::Kind::fixed:
            if (policy_.fixed_user < 0 || policy_.fixed_user >= n_) {
                throw std::invalid_argument("fixed-user policy index out of range");
            }
            return policy_.fixed_user;
        case EnginePolicy::Kind::custom: {
            std::vector<std::optional<LatestFeedback>> latest(static_cast<std::size_t>(n_));
            for (int u = 0; u < n_; ++u) {
                if (g.has) {
                    latest[static_cast<std::size_t>(u)] =
                        LatestFeedback{((g.bits >> u) & 1u) != 0, t + g.lag + 1};
                }
            }
            const int a = policy_.decide(InfoView{t, beliefs, latest});
            if (a < 0 || a >= n_) throw std::out_of_range("custom policy returned a bad user");
            return a;
        }
        default:
            throw std::logic_error("decide() called for a non-deterministic policy");
        }
    }

    double value(std::uint64_t key, int t) {
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const GState g = decode(key);
        const std::vector<double> beliefs = beliefs_of(g, t);
        double reward;
        switch (policy_.kind) {
        // Observations are action-independent, so maximizing the immediate
        // reward is optimal: the optimal and greedy variants coincide here by
        // construction, and both are computed the same way.
        case EnginePolicy::Kind::optimal:
        case EnginePolicy::Kind::greedy:
            reward = *std::max_element(beliefs.begin(), beliefs.end());
            break;
        case EnginePolicy::Kind::random_uniform: {
            reward = 0.0;
            for (double b : beliefs) reward += b;
            reward /= n_;
            break;
        }
        default:
            reward = beliefs[static_cast<std::size_t>(decide(g, t, beliefs))];
        }
        double v = reward;
        if (t > 1) {
            for (const auto& [child, prob] : transitions(g, t)) {
                v += prob * value(child, t - 1);
            }
        }
        memo_.emplace(key, v);
        return v;
    }

    std::vector<std::pair<std::uint64_t, double>> transitions(const GState& g, int t) {
        std::vector<int> ages;
        for (int age = 1; age <= dmax_; ++age) {
            if (g.pending & (1u << (age - 1))) ages.push_back(age);
        }
        ages.push_back(0); // this slot's packet
        std::vector<std::pair<std::uint64_t, double>> out;
        const std::size_t count = ages.size();
        for (unsigned mask = 0; mask < (1u << count); ++mask) {
            double prob = 1.0;
            int a_min = -1;
            unsigned survivors = 0;
            for (std::size_t i = 0; i < count; ++i) {
                const double h = inst_.delay.hazard(ages[i]);
                if (mask & (1u << i)) {
                    prob *= h;
                    if (a_min < 0 || ages[i] < a_min) a_min = ages[i];
                } else {
                    prob *= 1.0 - h;
                    survivors |= 1u << ages[i]; // age+1 at t-1 => bit age
                }
            }
            if (prob == 0.0) continue;
            GState next;
            if (a_min < 0) {
                next = g;
                if (next.has) ++next.lag;
                next.pending = survivors;
                out.emplace_back(encode(next, t - 1), prob);
                continue;
            }
            next.has = true;
            next.lag = a_min;
            next.pending = survivors & ((1u << a_min) - 1u);
            // Joint law of the newly revealed state vector: independent users,
            // each bridged from its previously revealed bit or initial belief.
            std::array<double, hard_max_users> p_on{};
            for (int u = 0; u < n_; ++u) {
                const ChannelParams& cp = inst_.params[static_cast<std::size_t>(u)];
                if (g.has) {
                    const unsigned steps = static_cast<unsigned>(g.lag + 1 - a_min);
                    p_on[static_cast<std::size_t>(u)] =
                        t_operator((g.bits >> u) & 1u ? 1.0 : 0.0, steps, cp);
                } else {
                    const int k_new = t + a_min;
                    p_on[static_cast<std::size_t>(u)] =
                        t_operator(inst_.initial_beliefs[static_cast<std::size_t>(u)],
                                   static_cast<unsigned>(inst_.horizon - k_new), cp);
                }
            }
            for (unsigned bits = 0; bits < (1u << n_); ++bits) {
                double bp = prob;
                for (int u = 0; u < n_ && bp != 0.0; ++u) {
                    bp *= (bits >> u) & 1u ? p_on[static_cast<std::size_t>(u)]
                                           : 1.0 - p_on[static_cast<std::size_t>(u)];
                }
                if (bp == 0.0) continue;
                next.bits = bits;
                out.emplace_back(encode(next, t - 1), bp);
            }
        }
        return out;
    }

    std::vector<double> per_slot_breakdown() {
        std::vector<double> per_slot(static_cast<std::size_t>(inst_.horizon), 0.0);
        std::vector<std::pair<std::uint64_t, double>> dist{{empty_key(inst_.horizon), 1.0}};
        std::unordered_map<std::uint64_t, double> next;
        for (int t = inst_.horizon; t >= 1; --t) {
            next.clear();
            std::sort(dist.begin(), dist.end());
            for (const auto& [key, prob] : dist) {
                const GState g = decode(key);
                const std::vector<double> beliefs = beliefs_of(g, t);
                double reward;
                switch (policy_.kind) {
                case EnginePolicy::Kind::optimal:
                case EnginePolicy::Kind::greedy:
                    reward = *std::max_element(beliefs.begin(), beliefs.end());
                    break;
                case EnginePolicy::Kind::random_uniform: {
                    reward = 0.0;
                    for (double b : beliefs) reward += b;
                    reward /= n_;
                    break;
                }
                default:
                    reward = beliefs[static_cast<std::size_t>(decide(g, t, beliefs))];
                }
                per_slot[static_cast<std::size_t>(inst_.horizon - t)] += prob * reward;
                if (t > 1) {
                    for (const auto& [child, cp] : transitions(g, t)) next[child] += prob * cp;
                }
            }
            dist.assign(next.begin(), next.end());
        }
        return per_slot;
    }
};

} // namespace

std::string EnginePolicy::label() const {
    switch (kind) {
    case Kind::optimal: return "optimal";
    case Kind::greedy: return "greedy";
    case Kind::random_uniform: return "random";
    case Kind::fixed: return "fixed:" + std::to_string(fixed_user);
    case Kind::custom: return "custom";
    }
    return "unknown";
}

ExactResult exact_value(const Instance& instance, const EnginePolicy& policy,
                        const ExactLimits& limits) {
    check_limits(instance, limits);
    if (policy.kind == EnginePolicy::Kind::custom && !policy.decide) {
        throw std::invalid_argument("custom policy needs a decision rule");
    }
    return ArqEngine(instance, policy).run();
}

ExactResult exact_genie_value(const Instance& instance, const EnginePolicy& policy,
                              const ExactLimits& limits) {
    check_limits(instance, limits);
    if (policy.kind == EnginePolicy::Kind::custom && !policy.decide) {
        throw std::invalid_argument("custom policy needs a decision rule");
    }
    return GenieEngine(instance, policy).run();
}

double path_enumeration_value(const Instance& instance, const PathPolicy& policy) {
    instance.validate();
    if (!instance.delay.deterministic()) {
        throw std::invalid_argument("path enumeration requires a deterministic delay");
    }
    const int n = instance.user_count();
    const int m = instance.horizon;
    if (n * m > 22) {
        throw std::invalid_argument("path enumeration capped at N*m <= 22, got " +
                                    std::to_string(n * m));
    }
    const int d = instance.delay.deterministic_delay();
    const std::uint64_t paths = 1ull << (n * m);
    std::vector<std::vector<ChannelState>> states(
        static_cast<std::size_t>(n), std::vector<ChannelState>(static_cast<std::size_t>(m)));
    double total = 0.0;
    for (std::uint64_t path = 0; path < paths; ++path) {
        // Bit (u*m + t-1) = state of user u at slot t.
        double prob = 1.0;
        for (int u = 0; u < n && prob != 0.0; ++u) {
            const ChannelParams& cp = instance.params[static_cast<std::size_t>(u)];
            for (int t = m; t >= 1; --t) {
                const bool on = (path >> (u * m + t - 1)) & 1ull;
                states[static_cast<std::size_t>(u)][static_cast<std::size_t>(t - 1)] =
                    on ? ChannelState::on : ChannelState::off;
                if (t == m) {
                    const double pi = instance.initial_beliefs[static_cast<std::size_t>(u)];
                    prob *= on ? pi : 1.0 - pi;
                } else {
                    const bool prev = (path >> (u * m + t)) & 1ull;
                    const double p_on = prev ? cp.p : cp.r;
                    prob *= on ? p_on : 1.0 - p_on;
                }
                if (prob == 0.0) break;
            }
        }
        if (prob == 0.0) continue;
        BeliefTracker tracker(instance.params, instance.initial_beliefs, m);
        std::vector<FeedbackEvent> in_flight;
        double reward = 0.0;
        for (int t = m; t >= 1; --t) {
            const int a = policy(PathView{t, states, tracker});
            if (a < 0 || a >= n) throw std::out_of_range("path policy returned a bad user");
            const bool on =
                states[static_cast<std::size_t>(a)][static_cast<std::size_t>(t - 1)] ==
                ChannelState::on;
            if (on) reward += 1.0;
            in_flight.push_back(FeedbackEvent::make(a, t, on, d));
            ArrivalSplit split = arrivals_at_slot_end(in_flight, t);
            tracker.update_arrivals(split.arrived);
            in_flight = std::move(split.pending);
        }
        total += prob * reward;
    }
    return total;
}

} // namespace arqsched
