#include "arqsched/delay.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace arqsched {

namespace {
constexpr int max_support = 64;
constexpr double sum_tolerance = 1e-12;
} // namespace

DelayPmf::DelayPmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw std::invalid_argument("delay pmf must have at least one entry");
    }
    if (static_cast<int>(probs_.size()) - 1 > max_support) {
        throw std::invalid_argument("delay pmf support exceeds d_max = 64");
    }
    double sum = 0.0;
    for (double q : probs_) {
        if (!(q >= 0.0)) {
            throw std::invalid_argument("delay pmf entries must be nonnegative");
        }
        sum += q;
    }
    if (std::abs(sum - 1.0) > sum_tolerance) {
        throw std::invalid_argument("delay pmf entries must sum to 1 within 1e-12, got " +
                                    std::to_string(sum));
    }
    cdf_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t d = 0; d < probs_.size(); ++d) {
        acc += probs_[d];
        cdf_[d] = acc < 1.0 ? acc : 1.0;
    }
    cdf_.back() = 1.0;
}

DelayPmf DelayPmf::parse(std::string_view text) {
    std::vector<double> probs;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        std::string field(text.substr(pos, comma - pos));
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(field, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("delay pmf field is not a number: '" + field + "'");
        }
        while (used < field.size() && (field[used] == ' ' || field[used] == '\t')) ++used;
        if (used != field.size()) {
            throw std::invalid_argument("delay pmf field is not a number: '" + field + "'");
        }
        probs.push_back(value);
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return DelayPmf(std::move(probs));
}

double DelayPmf::prob(int d) const {
    if (d < 0 || d > max_delay()) return 0.0;
    return probs_[static_cast<std::size_t>(d)];
}

double DelayPmf::cdf_at_most(int d) const {
    if (d < 0) return 0.0;
    if (d >= max_delay()) return 1.0;
    return cdf_[static_cast<std::size_t>(d)];
}

double DelayPmf::tail_beyond(int d) const { return 1.0 - cdf_at_most(d); }

double DelayPmf::hazard(int age) const {
    // At or beyond the support edge a pending packet has surely arrived;
    // returning exactly 1 avoids quotient rounding like (1/3) / (1 - 2/3).
    if (age >= max_delay()) return 1.0;
    const double at_least = tail_beyond(age - 1);
    if (at_least <= 0.0) return 1.0;
    const double h = prob(age) / at_least;
    return h < 1.0 ? h : 1.0;
}

int DelayPmf::sample(Rng& rng) const {
    const double u = rng.next_unit();
    for (std::size_t d = 0; d + 1 < cdf_.size(); ++d) {
        if (u < cdf_[d]) return static_cast<int>(d);
    }
    return max_delay();
}

DelayPmf DelayPmf::point_mass(int d) {
    if (d < 0) throw std::invalid_argument("point-mass delay must be nonnegative");
    std::vector<double> probs(static_cast<std::size_t>(d) + 1, 0.0);
    probs.back() = 1.0;
    return DelayPmf(std::move(probs));
}

bool DelayPmf::deterministic() const {
    for (double q : probs_) {
        if (q == 1.0) return true;
        if (q != 0.0) return false;
    }
    return false;
}

int DelayPmf::deterministic_delay() const {
    for (std::size_t d = 0; d < probs_.size(); ++d) {
        if (probs_[d] == 1.0) return static_cast<int>(d);
        if (probs_[d] != 0.0) break;
    }
    throw std::logic_error("delay pmf is not a point mass");
}

std::string DelayPmf::text() const {
    std::string out;
    char buf[32];
    for (std::size_t d = 0; d < probs_.size(); ++d) {
        std::snprintf(buf, sizeof(buf), "%.10g", probs_[d]);
        if (d) out += ',';
        out += buf;
    }
    return out;
}

FeedbackEvent FeedbackEvent::make(int user, int origin_slot, bool ack, int delay) {
    if (delay < 0) throw std::invalid_argument("delay must be nonnegative");
    return FeedbackEvent{user, origin_slot, ack, origin_slot - delay};
}

double FreshnessPmf::total() const {
    double sum = none_prob;
    for (double q : lag_probs) sum += q;
    return sum;
}

FreshnessPmf freshness_pmf(const DelayPmf& pmf, int elapsed) {
    if (elapsed < 0) throw std::invalid_argument("elapsed slot count must be nonnegative");
    FreshnessPmf out;
    out.lag_probs.resize(static_cast<std::size_t>(elapsed), 0.0);
    double not_arrived = 1.0; // prod_{j<l} P(D > j)
    for (int l = 0; l < elapsed; ++l) {
        out.lag_probs[static_cast<std::size_t>(l)] = pmf.cdf_at_most(l) * not_arrived;
        not_arrived *= pmf.tail_beyond(l);
    }
    out.none_prob = not_arrived;
    return out;
}

int sample_delay(const DelayPmf& pmf, Rng& rng) { return pmf.sample(rng); }

ArrivalSplit arrivals_at_slot_end(const std::vector<FeedbackEvent>& in_flight, int slot) {
    ArrivalSplit split;
    for (const FeedbackEvent& ev : in_flight) {
        (ev.arrival_slot == slot ? split.arrived : split.pending).push_back(ev);
    }
    return split;
}

} // namespace arqsched
