#include "arqsched/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arqsched {

namespace {

// w_l = P(D <= l) * prod_{j<l} P(D > j) for l = 0..d_max; sums to one.
std::vector<double> freshness_weights(const DelayPmf& delay) {
    std::vector<double> w(static_cast<std::size_t>(delay.max_delay()) + 1);
    double tail_product = 1.0;
    for (int l = 0; l <= delay.max_delay(); ++l) {
        w[static_cast<std::size_t>(l)] = delay.cdf_at_most(l) * tail_product;
        tail_product *= delay.tail_beyond(l);
    }
    return w;
}

double off_power(double p_s, int n) {
    double q = 1.0;
    for (int i = 0; i < n; ++i) q *= 1.0 - p_s;
    return q;
}

void check_alpha(const std::array<double, 4>& alpha) {
    for (double a : alpha) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw std::invalid_argument("alpha entries must lie in [0, 1]");
        }
    }
}

struct Z1Point {
    double x;
    double y;
};

Z1Point z1_point(const ChannelParams& params, int d) {
    const double s = steady_state(params);
    const double tdp = t_operator(params.p, static_cast<unsigned>(d), params);
    const double tdr = t_operator(params.r, static_cast<unsigned>(d), params);
    return {s * tdp + (1.0 - s) * (1.0 - s) * tdr, (1.0 - s) * s * tdp};
}

} // namespace

CapacityResult sum_capacity_two_user(const ChannelParams& params, const DelayPmf& delay) {
    const double s = steady_state(params);
    const std::vector<double> w = freshness_weights(delay);
    CapacityResult out;
    out.terms.resize(w.size());
    for (std::size_t l = 0; l < w.size(); ++l) {
        const double tlp = t_operator(params.p, static_cast<unsigned>(l), params);
        out.terms[l] = w[l] * (s * tlp + (1.0 - s) * s);
        out.value += out.terms[l];
    }
    return out;
}

CapacityResult genie_sum_capacity(const ChannelParams& params, const DelayPmf& delay,
                                  int n_users) {
    if (n_users < 1) throw std::invalid_argument("genie capacity needs at least one user");
    const double s = steady_state(params);
    const double q = off_power(s, n_users);
    const std::vector<double> w = freshness_weights(delay);
    CapacityResult out;
    out.terms.resize(w.size());
    for (std::size_t l = 0; l < w.size(); ++l) {
        const double tlp = t_operator(params.p, static_cast<unsigned>(l), params);
        const double tlr = t_operator(params.r, static_cast<unsigned>(l), params);
        out.terms[l] = w[l] * ((1.0 - q) * tlp + q * tlr);
        out.value += out.terms[l];
    }
    return out;
}

CapacityBounds sum_capacity_bounds(const ChannelParams& params, const DelayPmf& delay,
                                   int n_users) {
    if (n_users <= 2) {
        throw std::invalid_argument(
            "bounds are for N > 2; the exact sum capacity exists for N <= 2");
    }
    return {sum_capacity_two_user(params, delay).value,
            genie_sum_capacity(params, delay, n_users).value};
}

RegionBounds region_bounds(const ChannelParams& params, const DelayPmf& delay, int n_users) {
    if (n_users < 2) throw std::invalid_argument("region bounds need N >= 2");
    if (n_users > 16) throw std::invalid_argument("region bounds capped at N <= 16");
    RegionBounds out;
    out.outer.dimension = n_users;

    std::vector<double> genie_by_size(static_cast<std::size_t>(n_users) + 1, 0.0);
    for (int k = 1; k <= n_users; ++k) {
        genie_by_size[static_cast<std::size_t>(k)] = genie_sum_capacity(params, delay, k).value;
    }
    for (unsigned mask = 1; mask < (1u << n_users); ++mask) {
        OuterConstraint c;
        for (int i = 0; i < n_users; ++i) {
            if (mask & (1u << i)) c.users.push_back(i);
        }
        c.bound = genie_by_size[c.users.size()];
        out.outer.constraints.push_back(std::move(c));
    }

    const double s = steady_state(params);
    const double half_c2 = sum_capacity_two_user(params, delay).value / 2.0;
    out.inner.push_back({"O", std::vector<double>(static_cast<std::size_t>(n_users), 0.0)});
    for (int i = 0; i < n_users; ++i) {
        RegionVertex v{"X" + std::to_string(i + 1),
                       std::vector<double>(static_cast<std::size_t>(n_users), 0.0)};
        v.coordinates[static_cast<std::size_t>(i)] = s;
        out.inner.push_back(std::move(v));
    }
    for (int j = 0; j < n_users; ++j) {
        for (int k = j + 1; k < n_users; ++k) {
            RegionVertex v{"Y" + std::to_string(j + 1) + "," + std::to_string(k + 1),
                           std::vector<double>(static_cast<std::size_t>(n_users), 0.0)};
            v.coordinates[static_cast<std::size_t>(j)] = half_c2;
            v.coordinates[static_cast<std::size_t>(k)] = half_c2;
            out.inner.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<RegionVertex> genie_region_n2(const ChannelParams& params, const DelayPmf& delay) {
    if (!delay.deterministic()) {
        throw std::invalid_argument("the exact two-user genie region needs a deterministic delay");
    }
    const int d = delay.deterministic_delay();
    const double s = steady_state(params);
    const Z1Point z1 = z1_point(params, d);
    return {
        {"O", {0.0, 0.0}},
        {"X1", {s, 0.0}},
        {"Z1", {z1.x, z1.y}},
        {"Z2", {z1.y, z1.x}},
        {"X2", {0.0, s}},
    };
}

AlphaThroughputs alpha_throughputs(const ChannelParams& params, int det_delay,
                                   const std::array<double, 4>& alpha) {
    if (det_delay < 0) throw std::invalid_argument("delay must be >= 0");
    check_alpha(alpha);
    const double s = steady_state(params);
    const double q = 1.0 - s;
    const double tdp = t_operator(params.p, static_cast<unsigned>(det_delay), params);
    const double tdr = t_operator(params.r, static_cast<unsigned>(det_delay), params);
    AlphaThroughputs out;
    // Case order: (off,off), (off,on), (on,off), (on,on) for (user0, user1).
    out.mu1 = q * q * alpha[0] * tdr + q * s * alpha[1] * tdr + s * q * alpha[2] * tdp +
              s * s * alpha[3] * tdp;
    out.mu2 = q * q * (1.0 - alpha[0]) * tdr + q * s * (1.0 - alpha[1]) * tdp +
              s * q * (1.0 - alpha[2]) * tdr + s * s * (1.0 - alpha[3]) * tdp;
    return out;
}

AlphaEdgePoints alpha_edge_points(const ChannelParams& params, int det_delay,
                                  const std::array<double, 4>& alpha) {
    if (det_delay < 0) throw std::invalid_argument("delay must be >= 0");
    check_alpha(alpha);
    if (!(alpha[2] >= alpha[1])) {
        throw std::invalid_argument("edge points are defined for alpha[2] >= alpha[1]");
    }
    const double s = steady_state(params);
    const double beta = 1.0 - (alpha[2] - alpha[1]);
    const Z1Point z1 = z1_point(params, det_delay);
    AlphaEdgePoints out;
    out.e_x1z1 = {beta * s + (1.0 - beta) * z1.x, (1.0 - beta) * z1.y};
    out.e_x2z2 = {(1.0 - beta) * z1.y, beta * s + (1.0 - beta) * z1.x};
    return out;
}

bool hull_contains(const std::vector<RegionVertex>& vertices, const std::vector<double>& point) {
    if (vertices.empty()) throw std::invalid_argument("hull needs at least one vertex");
    const std::size_t dim = point.size();
    for (const RegionVertex& v : vertices) {
        if (v.coordinates.size() != dim) {
            throw std::invalid_argument("vertex/point dimension mismatch");
        }
    }

    // Phase-1 LP: find beta >= 0 with V beta = point, sum(beta) = 1, by
    // minimizing the sum of one artificial per row. Bland's rule on the
    // structural columns; artificials never re-enter.
    const std::size_t rows = dim + 1;
    const std::size_t cols = vertices.size();
    constexpr double pivot_eps = 1e-11;

    std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
    std::vector<double> rhs(rows);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = vertices[j].coordinates[i];
        rhs[i] = point[i];
        if (rhs[i] < 0.0) {
            rhs[i] = -rhs[i];
            for (double& c : a[i]) c = -c;
        }
    }
    for (std::size_t j = 0; j < cols; ++j) a[dim][j] = 1.0;
    rhs[dim] = 1.0;

    // Objective row of the artificial sum, expressed over structural columns.
    std::vector<double> obj(cols, 0.0);
    double obj_value = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) obj[j] += a[i][j];
        obj_value += rhs[i];
    }
    // basis[i] = structural column in row i, or npos while artificial.
    std::vector<std::size_t> basis(rows, static_cast<std::size_t>(-1));

    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t enter = static_cast<std::size_t>(-1);
        for (std::size_t j = 0; j < cols; ++j) {
            if (obj[j] > pivot_eps) {
                enter = j;
                break;
            }
        }
        if (enter == static_cast<std::size_t>(-1)) break;

        std::size_t leave = static_cast<std::size_t>(-1);
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (a[i][enter] > pivot_eps) {
                const double ratio = rhs[i] / a[i][enter];
                if (leave == static_cast<std::size_t>(-1) || ratio < best_ratio - pivot_eps ||
                    (ratio < best_ratio + pivot_eps && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leave == static_cast<std::size_t>(-1)) break; // unbounded: infeasible direction

        const double pivot = a[leave][enter];
        for (std::size_t j = 0; j < cols; ++j) a[leave][j] /= pivot;
        rhs[leave] /= pivot;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == leave || a[i][enter] == 0.0) continue;
            const double factor = a[i][enter];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= factor * a[leave][j];
            rhs[i] -= factor * rhs[leave];
        }
        const double ofactor = obj[enter];
        if (ofactor != 0.0) {
            for (std::size_t j = 0; j < cols; ++j) obj[j] -= ofactor * a[leave][j];
            obj_value -= ofactor * rhs[leave];
        }
        basis[leave] = enter;
    }
    return obj_value <= 1e-9;
}

} // namespace arqsched
