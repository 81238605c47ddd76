#include "arqsched/problem.hpp"

#include <stdexcept>

namespace arqsched {

bool Instance::identical_params() const {
    for (const ChannelParams& cp : params) {
        if (cp.p != params.front().p || cp.r != params.front().r) return false;
    }
    return true;
}

void Instance::validate() const {
    if (params.empty()) throw std::invalid_argument("need at least one user");
    if (params.size() != initial_beliefs.size()) {
        throw std::invalid_argument("one initial belief per user required");
    }
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    for (double x : initial_beliefs) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument("initial beliefs must lie in [0, 1]");
        }
    }
}

Instance Instance::homogeneous(const ChannelParams& shared, std::vector<double> initial_beliefs,
                               int horizon, DelayPmf delay) {
    Instance inst{std::vector<ChannelParams>(initial_beliefs.size(), shared),
                  std::move(initial_beliefs), horizon, std::move(delay)};
    inst.validate();
    return inst;
}

Instance Instance::stationary(const ChannelParams& shared, int n_users, int horizon,
                              DelayPmf delay) {
    if (n_users < 1) throw std::invalid_argument("need at least one user");
    return homogeneous(shared,
                       std::vector<double>(static_cast<std::size_t>(n_users), steady_state(shared)),
                       horizon, std::move(delay));
}

} // namespace arqsched
