#pragma once

#include "arqsched/channel.hpp"
#include "arqsched/delay.hpp"

#include <array>
#include <string>
#include <vector>

namespace arqsched {

// Closed-form steady-state per-slot rates. Each series runs over the
// freshness lag l of the newest available feedback: once the system has run
// longer than the delay support, that lag is distributed
//   w_l = P(D <= l) * prod_{j<l} P(D > j),   l = 0..d_max,
// which sums to one. The capacity interpretation is for the positively
// correlated regime (p > r); the series itself is defined for any valid
// parameters.
struct CapacityResult {
    double value = 0.0;          // sum of terms
    std::vector<double> terms;   // contribution of each lag l, index l
};

// Two-user sum capacity under ARQ feedback (equals the two-user genie-aided
// capacity): term_l = p_s T^l(p) + (1 - p_s) p_s.
CapacityResult sum_capacity_two_user(const ChannelParams& params, const DelayPmf& delay);

// N-user genie-aided sum capacity:
// term_l = (1 - (1-p_s)^N) T^l(p) + (1-p_s)^N T^l(r).
CapacityResult genie_sum_capacity(const ChannelParams& params, const DelayPmf& delay, int n_users);

struct CapacityBounds {
    double lower = 0.0; // two-user sum capacity
    double upper = 0.0; // N-user genie capacity
};

// Sandwich for N > 2, where the exact N-user sum capacity is open. Refused
// for N <= 2 (the exact value exists; use the direct functions).
CapacityBounds sum_capacity_bounds(const ChannelParams& params, const DelayPmf& delay,
                                   int n_users);

struct RegionVertex {
    std::string label;
    std::vector<double> coordinates;
};

// One outer bound: sum_{i in users} x_i <= bound.
struct OuterConstraint {
    std::vector<int> users; // nonempty subset, ascending
    double bound;
};

struct OuterPolytope {
    int dimension = 0;
    std::vector<OuterConstraint> constraints; // all 2^N - 1 nonempty subsets
};

struct RegionBounds {
    OuterPolytope outer;
    std::vector<RegionVertex> inner; // O, X_i = p_s e_i, Y_{j,k} = C2/2 at j,k
};

// Outer polytope (per-subset genie bounds) and inner achievable hull vertices
// for the N-user throughput region. Every inner vertex satisfies every outer
// constraint.
RegionBounds region_bounds(const ChannelParams& params, const DelayPmf& delay, int n_users);

// Exact two-user genie region under deterministic delay: the convex hull of
// O, X1, Z1, Z2, X2, returned in that (counterclockwise) order with
//   Z1 = (p_s T^d(p) + (1-p_s)^2 T^d(r),  (1-p_s) p_s T^d(p)),
// Z2 its coordinate swap, and X_i = p_s e_i.
std::vector<RegionVertex> genie_region_n2(const ChannelParams& params, const DelayPmf& delay);

struct AlphaThroughputs {
    double mu1 = 0.0; // user 0
    double mu2 = 0.0; // user 1
    double sum() const { return mu1 + mu2; }
};

// Stationary throughput pair of the two-user genie scheduler that reads the
// revealed state pair of slot t+d+1 and picks user 0 with probability
// alpha[c], c = alpha_case(state pair). Deterministic delay d.
AlphaThroughputs alpha_throughputs(const ChannelParams& params, int det_delay,
                                   const std::array<double, 4>& alpha);

// Mixture points on the X1-Z1 and X2-Z2 edges induced by an alpha scheduler
// with alpha[2] >= alpha[1]: with beta = 1 - (alpha[2] - alpha[1]), the point
// on the Xi-Zi edge is beta Xi + (1-beta) Zi. Their first coordinates bracket
// mu1 and both coordinate sums equal mu1 + mu2.
struct AlphaEdgePoints {
    AlphaThroughputs e_x1z1;
    AlphaThroughputs e_x2z2;
};

AlphaEdgePoints alpha_edge_points(const ChannelParams& params, int det_delay,
                                  const std::array<double, 4>& alpha);

// True iff point is a convex combination of the vertices, solved as a small
// phase-1 feasibility program (Bland's rule, residual tolerance 1e-9).
bool hull_contains(const std::vector<RegionVertex>& vertices, const std::vector<double>& point);

} // namespace arqsched
