#include "arqsched/evaluate.hpp"

#include "arqsched/csv.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace arqsched {

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

EnginePolicy engine_policy_for(const Instance& instance, const PolicySpec& policy) {
    switch (policy.kind) {
    case PolicySpec::Kind::greedy:
        return EnginePolicy::greedy();
    case PolicySpec::Kind::greedy_queue:
        // Valid greedy-queue instances take exactly the greedy decisions, so
        // the exact value is evaluated through the greedy engine policy.
        if (!instance.identical_params()) {
            throw std::invalid_argument("greedy-queue requires identical channels");
        }
        if (!(instance.params[0].p > instance.params[0].r)) {
            throw std::invalid_argument("greedy-queue requires positive memory (p > r)");
        }
        return EnginePolicy::greedy();
    case PolicySpec::Kind::random_uniform:
        return EnginePolicy::random_uniform();
    case PolicySpec::Kind::fixed:
        return EnginePolicy::fixed(policy.fixed_user);
    case PolicySpec::Kind::alpha:
        throw std::invalid_argument(
            "alpha is a genie-mode policy; evaluate it with policy_value_mc in genie mode");
    }
    throw std::invalid_argument("unknown policy kind");
}

ValueReport report_from_exact(const Instance& instance, std::string label, ExactResult result,
                              double runtime_ms) {
    return ValueReport{std::move(label), result.total,     std::move(result.per_slot),
                       0.0,              0,                 runtime_ms,
                       instance};
}

} // namespace

bool exactly_solvable(const Instance& instance, const ExactLimits& limits) {
    instance.validate();
    return instance.user_count() <= limits.max_users && instance.horizon <= limits.max_horizon &&
           instance.delay.max_delay() <= limits.max_delay && instance.user_count() <= 6 &&
           instance.horizon <= 16 && instance.delay.max_delay() <= 3;
}

ValueReport optimal_value(const Instance& instance, const ExactLimits& limits) {
    Stopwatch timer;
    ExactResult result = exact_value(instance, EnginePolicy::optimal(), limits);
    return report_from_exact(instance, "optimal", std::move(result), timer.ms());
}

ValueReport policy_value_exact(const Instance& instance, const PolicySpec& policy,
                               const ExactLimits& limits) {
    Stopwatch timer;
    const EnginePolicy engine = engine_policy_for(instance, policy);
    ExactResult result = exact_value(instance, engine, limits);
    return report_from_exact(instance, policy.text(), std::move(result), timer.ms());
}

ValueReport policy_value_mc(const Instance& instance, ObservationMode mode,
                            const PolicySpec& policy, std::uint64_t episodes, std::uint64_t seed) {
    Stopwatch timer;
    McEstimate est = simulate_policy(instance, mode, policy, episodes, seed);
    std::string label = policy.text();
    if (mode == ObservationMode::genie) label += "@genie";
    return ValueReport{std::move(label), est.mean,   std::move(est.per_slot), est.std_error,
                       est.episodes,     timer.ms(), instance};
}

ValueReport genie_value(const Instance& instance) {
    Stopwatch timer;
    instance.validate();
    if (!instance.identical_params()) {
        throw std::invalid_argument("the genie closed form requires identical channels");
    }
    const ChannelParams& cp = instance.params[0];
    if (!(cp.p >= cp.r)) {
        throw std::invalid_argument("the genie closed form requires p >= r; "
                                    "use the genie expectimax for negative correlation");
    }
    const int n = instance.user_count();
    const int m = instance.horizon;
    std::vector<double> per_slot(static_cast<std::size_t>(m), 0.0);
    double total = 0.0;
    for (int t = m; t >= 1; --t) {
        const int elapsed = m - t;
        const FreshnessPmf fresh = freshness_pmf(instance.delay, elapsed);
        double v = 0.0;
        for (int l = 0; l < fresh.elapsed(); ++l) {
            const double w = fresh.lag_probs[static_cast<std::size_t>(l)];
            if (w == 0.0) continue;
            // The freshest packet reveals the states of slot t + l + 1, where
            // each user is on with probability x_u independently.
            double prod_off = 1.0;
            for (int u = 0; u < n; ++u) {
                const double x = t_operator(instance.initial_beliefs[static_cast<std::size_t>(u)],
                                            static_cast<unsigned>(elapsed - l - 1), cp);
                prod_off *= 1.0 - x;
            }
            const double tlp = t_operator(cp.p, static_cast<unsigned>(l), cp);
            const double tlr = t_operator(cp.r, static_cast<unsigned>(l), cp);
            v += w * ((1.0 - prod_off) * tlp + prod_off * tlr);
        }
        if (fresh.none_prob != 0.0) {
            double best = 0.0;
            for (int u = 0; u < n; ++u) {
                best = std::max(best,
                                t_operator(instance.initial_beliefs[static_cast<std::size_t>(u)],
                                           static_cast<unsigned>(elapsed), cp));
            }
            v += fresh.none_prob * best;
        }
        per_slot[static_cast<std::size_t>(m - t)] = v;
        total += v;
    }
    return ValueReport{"genie", total, std::move(per_slot), 0.0, 0, timer.ms(), instance};
}

ValueReport genie_optimal_exact(const Instance& instance, const ExactLimits& limits) {
    Stopwatch timer;
    ExactResult result = exact_genie_value(instance, EnginePolicy::optimal(), limits);
    return report_from_exact(instance, "genie-optimal", std::move(result), timer.ms());
}

double fixed_user_value(const Instance& instance, int user) {
    instance.validate();
    if (user < 0 || user >= instance.user_count()) {
        throw std::invalid_argument("user index out of range");
    }
    double total = 0.0;
    for (int t = instance.horizon; t >= 1; --t) {
        total += t_operator(instance.initial_beliefs[static_cast<std::size_t>(user)],
                            static_cast<unsigned>(instance.horizon - t),
                            instance.params[static_cast<std::size_t>(user)]);
    }
    return total;
}

double random_policy_value(const Instance& instance) {
    instance.validate();
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) total += fixed_user_value(instance, u);
    return total / instance.user_count();
}

SuboptimalityReport suboptimality_report(const Instance& instance, std::uint64_t episodes,
                                         std::uint64_t seed, const ExactLimits& limits) {
    SuboptimalityReport out;
    if (exactly_solvable(instance, limits)) {
        out.exact_route = true;
        out.reference_label = "optimal";
        out.reference_value = optimal_value(instance, limits).total;
        out.greedy_value = policy_value_exact(instance, PolicySpec{}, limits).total;
    } else {
        if (episodes == 0) {
            throw std::invalid_argument(
                "instance too large for exact evaluation; Monte Carlo needs episodes >= 1");
        }
        out.exact_route = false;
        out.reference_label = "genie";
        out.reference_value = genie_value(instance).total;
        const ValueReport mc =
            policy_value_mc(instance, ObservationMode::arq, PolicySpec{}, episodes, seed);
        out.greedy_value = mc.total;
        out.greedy_std_error = mc.std_error;
    }
    out.percent = out.reference_value != 0.0
                      ? 100.0 * (out.reference_value - out.greedy_value) / out.reference_value
                      : 0.0;
    return out;
}

std::vector<std::string> value_csv_header() {
    return {"policy", "N", "m", "p", "r", "delay_pmf", "value", "stderr", "runtime_ms"};
}

std::vector<std::string> value_csv_row(const ValueReport& report) {
    const Instance& inst = report.instance;
    std::string p_text;
    std::string r_text;
    for (int u = 0; u < inst.user_count(); ++u) {
        if (u && inst.identical_params()) break;
        if (u) {
            p_text += ";";
            r_text += ";";
        }
        p_text += csv::format_double(inst.params[static_cast<std::size_t>(u)].p);
        r_text += csv::format_double(inst.params[static_cast<std::size_t>(u)].r);
    }
    return {report.policy,
            std::to_string(inst.user_count()),
            std::to_string(inst.horizon),
            p_text,
            r_text,
            inst.delay.text(),
            csv::format_double(report.total),
            csv::format_double(report.std_error),
            csv::format_double(report.runtime_ms)};
}

} // namespace arqsched
