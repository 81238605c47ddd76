#include "arqsched/simulate.hpp"

#include "arqsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace arqsched {

namespace {

int parse_int(std::string_view text, const char* what) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(std::string(text), &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("bad ") + what + ": '" + std::string(text) + "'");
    }
    if (used != text.size()) {
        throw std::invalid_argument(std::string("bad ") + what + ": '" + std::string(text) + "'");
    }
    return value;
}

double parse_prob(std::string_view text, const char* what) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(std::string(text), &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("bad ") + what + ": '" + std::string(text) + "'");
    }
    if (used != text.size() || !(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got '" +
                                    std::string(text) + "'");
    }
    return value;
}

std::string format_prob(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

void validate_policy(const Instance& instance, ObservationMode mode, const PolicySpec& policy) {
    const int n = instance.user_count();
    switch (policy.kind) {
    case PolicySpec::Kind::fixed:
        if (policy.fixed_user < 0 || policy.fixed_user >= n) {
            throw std::invalid_argument("fixed policy user index out of range: " +
                                        std::to_string(policy.fixed_user));
        }
        break;
    case PolicySpec::Kind::greedy_queue:
        if (mode != ObservationMode::arq) {
            throw std::invalid_argument("greedy-queue runs under arq observations only");
        }
        if (!instance.identical_params()) {
            throw std::invalid_argument("greedy-queue requires identical channels");
        }
        if (!(instance.params[0].p > instance.params[0].r)) {
            throw std::invalid_argument("greedy-queue requires positive memory (p > r)");
        }
        break;
    case PolicySpec::Kind::alpha:
        if (mode != ObservationMode::genie) {
            throw std::invalid_argument("alpha policy runs under genie observations only");
        }
        if (n != 2) {
            throw std::invalid_argument("alpha policy is defined for exactly two users");
        }
        if (!instance.delay.deterministic()) {
            throw std::invalid_argument("alpha policy requires a deterministic delay");
        }
        for (double a : policy.alpha) {
            if (!(a >= 0.0 && a <= 1.0)) {
                throw std::invalid_argument("alpha entries must lie in [0, 1]");
            }
        }
        break;
    default:
        break;
    }
}

// Newest genie packet received so far plus the ones still in flight.
struct GenieInfo {
    bool has = false;
    int origin = 0;
    std::uint32_t bits = 0;

    struct Packet {
        int origin;
        int arrival;
        std::uint32_t bits;
    };
    std::vector<Packet> in_flight;

    double belief(const Instance& inst, int user, int t) const {
        const ChannelParams& cp = inst.params[static_cast<std::size_t>(user)];
        if (!has) {
            return t_operator(inst.initial_beliefs[static_cast<std::size_t>(user)],
                              static_cast<unsigned>(inst.horizon - t), cp);
        }
        const bool on = (bits >> user) & 1u;
        return t_operator(on ? cp.p : cp.r, static_cast<unsigned>(origin - t - 1), cp);
    }

    void deliver(int slot) {
        std::size_t keep = 0;
        for (const Packet& pkt : in_flight) {
            if (pkt.arrival == slot) {
                if (!has || pkt.origin < origin) {
                    has = true;
                    origin = pkt.origin;
                    bits = pkt.bits;
                }
            } else {
                in_flight[keep++] = pkt;
            }
        }
        in_flight.resize(keep);
    }
};

} // namespace

std::string to_string(ObservationMode mode) {
    return mode == ObservationMode::arq ? "arq" : "genie";
}

ObservationMode parse_observation_mode(std::string_view text) {
    if (text == "arq") return ObservationMode::arq;
    if (text == "genie") return ObservationMode::genie;
    throw std::invalid_argument("unknown observation mode '" + std::string(text) +
                                "' (expected arq or genie)");
}

PolicySpec PolicySpec::parse(std::string_view text) {
    PolicySpec spec;
    if (text == "greedy") {
        spec.kind = Kind::greedy;
        return spec;
    }
    if (text == "greedy-queue") {
        spec.kind = Kind::greedy_queue;
        return spec;
    }
    if (text == "random") {
        spec.kind = Kind::random_uniform;
        return spec;
    }
    if (text.rfind("fixed:", 0) == 0) {
        spec.kind = Kind::fixed;
        spec.fixed_user = parse_int(text.substr(6), "fixed user index");
        if (spec.fixed_user < 0) {
            throw std::invalid_argument("fixed user index must be >= 0");
        }
        return spec;
    }
    if (text.rfind("alpha:", 0) == 0) {
        spec.kind = Kind::alpha;
        std::string_view rest = text.substr(6);
        for (int i = 0; i < 4; ++i) {
            const std::size_t comma = rest.find(',');
            if ((i < 3) != (comma != std::string_view::npos)) {
                throw std::invalid_argument("alpha policy needs exactly four probabilities");
            }
            spec.alpha[static_cast<std::size_t>(i)] =
                parse_prob(rest.substr(0, comma), "alpha entry");
            if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
        }
        return spec;
    }
    throw std::invalid_argument(
        "unknown policy '" + std::string(text) +
        "' (expected greedy, greedy-queue, random, fixed:<i>, or alpha:<a0,a1,a2,a3>)");
}

std::string PolicySpec::text() const {
    switch (kind) {
    case Kind::greedy: return "greedy";
    case Kind::greedy_queue: return "greedy-queue";
    case Kind::random_uniform: return "random";
    case Kind::fixed: return "fixed:" + std::to_string(fixed_user);
    case Kind::alpha:
        return "alpha:" + format_prob(alpha[0]) + "," + format_prob(alpha[1]) + "," +
               format_prob(alpha[2]) + "," + format_prob(alpha[3]);
    }
    return "unknown";
}

EpisodeResult run_episode(const Instance& instance, ObservationMode mode, const PolicySpec& policy,
                          Rng& channel_rng, Rng& policy_rng) {
    instance.validate();
    validate_policy(instance, mode, policy);
    const int n = instance.user_count();
    const int m = instance.horizon;
    const bool alpha_mode = policy.kind == PolicySpec::Kind::alpha;
    const int det_delay = alpha_mode ? instance.delay.deterministic_delay() : 0;

    std::vector<ChannelState> state(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        state[static_cast<std::size_t>(u)] =
            channel_rng.next_bernoulli(instance.initial_beliefs[static_cast<std::size_t>(u)])
                ? ChannelState::on
                : ChannelState::off;
    }

    // Observation bookkeeping, instantiated per policy needs.
    std::unique_ptr<BeliefTracker> tracker;
    std::unique_ptr<ScheduleOrderVector> queue;
    GenieInfo genie;
    std::vector<FeedbackEvent> in_flight;
    const bool track_arq = mode == ObservationMode::arq &&
                           (policy.kind == PolicySpec::Kind::greedy ||
                            policy.kind == PolicySpec::Kind::greedy_queue);
    const bool track_genie = mode == ObservationMode::genie &&
                             (policy.kind == PolicySpec::Kind::greedy || alpha_mode);
    if (track_arq) {
        if (policy.kind == PolicySpec::Kind::greedy_queue) {
            queue = std::make_unique<ScheduleOrderVector>(instance.params[0],
                                                          instance.initial_beliefs);
        } else {
            tracker = std::make_unique<BeliefTracker>(instance.params, instance.initial_beliefs, m);
        }
    }

    EpisodeResult out;
    out.decisions.reserve(static_cast<std::size_t>(m));
    out.successes.reserve(static_cast<std::size_t>(m));
    std::vector<double> beliefs(static_cast<std::size_t>(n));

    for (int t = m; t >= 1; --t) {
        int action = 0;
        switch (policy.kind) {
        case PolicySpec::Kind::greedy:
            if (mode == ObservationMode::arq) {
                action = tracker->greedy_user(t);
            } else {
                for (int u = 0; u < n; ++u) {
                    beliefs[static_cast<std::size_t>(u)] = genie.belief(instance, u, t);
                }
                action = 0;
                for (int u = 1; u < n; ++u) {
                    if (beliefs[static_cast<std::size_t>(u)] >
                        beliefs[static_cast<std::size_t>(action)])
                        action = u;
                }
            }
            break;
        case PolicySpec::Kind::greedy_queue:
            action = queue->decide();
            break;
        case PolicySpec::Kind::random_uniform:
            action = policy_rng.next_below(n);
            break;
        case PolicySpec::Kind::fixed:
            action = policy.fixed_user;
            break;
        case PolicySpec::Kind::alpha: {
            if (t + det_delay + 1 > m) {
                // No packet revealed yet this early in the horizon.
                action = policy_rng.next_below(2);
            } else {
                if (!genie.has || genie.origin != t + det_delay + 1) {
                    throw std::logic_error("alpha policy expected the slot t+d+1 packet");
                }
                const int c = alpha_case((genie.bits >> 0) & 1u, (genie.bits >> 1) & 1u);
                action = policy_rng.next_unit() < policy.alpha[static_cast<std::size_t>(c)] ? 0 : 1;
            }
            break;
        }
        }

        const bool on = state[static_cast<std::size_t>(action)] == ChannelState::on;
        out.total += on ? 1.0 : 0.0;
        out.decisions.push_back(action);
        out.successes.push_back(on);

        // One delay draw per slot in every mode so channel streams stay
        // aligned across policies and modes under a common seed.
        const int delay = instance.delay.sample(channel_rng);
        if (mode == ObservationMode::arq) {
            if (track_arq) {
                const FeedbackEvent ev = FeedbackEvent::make(action, t, on, delay);
                if (ev.arrival_slot >= 1) in_flight.push_back(ev);
                ArrivalSplit split = arrivals_at_slot_end(in_flight, t);
                if (tracker) tracker->update_arrivals(split.arrived);
                if (queue) queue->update_arrivals(split.arrived);
                in_flight = std::move(split.pending);
            }
        } else if (track_genie) {
            std::uint32_t bits = 0;
            for (int u = 0; u < n; ++u) {
                if (state[static_cast<std::size_t>(u)] == ChannelState::on) bits |= 1u << u;
            }
            if (t - delay >= 1) genie.in_flight.push_back({t, t - delay, bits});
            genie.deliver(t);
        }

        if (t > 1) {
            for (int u = 0; u < n; ++u) {
                state[static_cast<std::size_t>(u)] =
                    transition(state[static_cast<std::size_t>(u)],
                               instance.params[static_cast<std::size_t>(u)], channel_rng);
            }
        }
    }
    return out;
}

McEstimate simulate_policy(const Instance& instance, ObservationMode mode,
                           const PolicySpec& policy, std::uint64_t episodes, std::uint64_t seed) {
    if (episodes == 0) throw std::invalid_argument("need at least one episode");
    instance.validate();
    validate_policy(instance, mode, policy);

    McEstimate est;
    est.episodes = episodes;
    est.per_slot.assign(static_cast<std::size_t>(instance.horizon), 0.0);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::uint64_t e = 0; e < episodes; ++e) {
        Rng channel_rng = episode_rng(seed, e);
        Rng policy_rng = episode_rng(seed, e, 1);
        const EpisodeResult ep = run_episode(instance, mode, policy, channel_rng, policy_rng);
        const double delta = ep.total - mean;
        mean += delta / static_cast<double>(e + 1);
        m2 += delta * (ep.total - mean);
        for (std::size_t s = 0; s < ep.successes.size(); ++s) {
            est.per_slot[s] += ep.successes[s] ? 1.0 : 0.0;
        }
    }
    est.mean = mean;
    est.std_error = episodes > 1
                        ? std::sqrt(m2 / static_cast<double>(episodes - 1) /
                                    static_cast<double>(episodes))
                        : 0.0;
    for (double& s : est.per_slot) s /= static_cast<double>(episodes);
    return est;
}

} // namespace arqsched
