#pragma once

#include "arqsched/exact.hpp"
#include "arqsched/problem.hpp"
#include "arqsched/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace arqsched {

// One evaluated (instance, policy) pair, exact or Monte Carlo. Exact routes
// report std_error = 0 and episodes = 0.
struct ValueReport {
    std::string policy;
    double total = 0.0;
    std::vector<double> per_slot; // index 0 = first slot (t = m)
    double std_error = 0.0;
    std::uint64_t episodes = 0;
    double runtime_ms = 0.0;
    Instance instance;
};

// Exact optimal value under ARQ observations (expectimax).
ValueReport optimal_value(const Instance& instance, const ExactLimits& limits = {});

// Exact value of a runtime policy on the ARQ information tree. greedy-queue
// maps to greedy after validating its preconditions (the two provably take
// identical decisions there); alpha is genie-only and refused here.
ValueReport policy_value_exact(const Instance& instance, const PolicySpec& policy,
                               const ExactLimits& limits = {});

// Monte Carlo estimate of a runtime policy in either observation mode.
ValueReport policy_value_mc(const Instance& instance, ObservationMode mode,
                            const PolicySpec& policy, std::uint64_t episodes, std::uint64_t seed);

// Exact finite-horizon value of the genie-aided greedy scheduler (which is
// optimal under genie observations), by freshness averaging: at slot t with
// e = m - t elapsed slots, reward =
//   sum_{l<e} P(l) [(1 - prod_u(1 - x_u)) T^l(p) + prod_u(1 - x_u) T^l(r)]
//   + P(none) max_u T^e(initial_u),   x_u = T^(e-l-1)(initial_u).
// Identical channels with p >= r required; arbitrary initial beliefs allowed
// (steady-state init reduces every x_u to p_s exactly).
ValueReport genie_value(const Instance& instance);

// Genie-mode expectimax (cross-check; handles p < r too).
ValueReport genie_optimal_exact(const Instance& instance, const ExactLimits& limits = {});

// Closed forms for the feedback-blind policies; the engines must agree.
double fixed_user_value(const Instance& instance, int user);
double random_policy_value(const Instance& instance);

struct SuboptimalityReport {
    std::string reference_label; // "optimal" (exact route) or "genie"
    double reference_value = 0.0;
    double greedy_value = 0.0;
    double greedy_std_error = 0.0; // 0 on the exact route
    double percent = 0.0;          // 100 (reference - greedy) / reference
    bool exact_route = false;
};

// Greedy-vs-reference gap row. Instances within the exact limits use
// optimal_value and the exact greedy value; larger ones use the genie closed
// form as reference and Monte Carlo greedy (episodes >= 1 then required).
SuboptimalityReport suboptimality_report(const Instance& instance, std::uint64_t episodes,
                                         std::uint64_t seed, const ExactLimits& limits = {});

// True when the instance fits the exact evaluators under the given limits.
bool exactly_solvable(const Instance& instance, const ExactLimits& limits = {});

// CSV row form: policy,N,m,p,r,delay_pmf,value,stderr,runtime_ms.
std::vector<std::string> value_csv_header();
std::vector<std::string> value_csv_row(const ValueReport& report);

} // namespace arqsched
