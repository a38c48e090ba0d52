#include "ctxband/subroutines.hpp"

#include "ctxband/error.hpp"

#include <cmath>
#include <string>

namespace ctxband {

SubroutineKind parse_subroutine_kind(std::string_view name) {
    if (name == "uniform") return SubroutineKind::UniformExplore;
    if (name == "ucb") return SubroutineKind::UCB;
    throw InputError("unknown subroutine '" + std::string(name) + "' (expected uniform or ucb)");
}

std::string_view to_string(SubroutineKind kind) {
    return kind == SubroutineKind::UCB ? "ucb" : "uniform";
}

SubroutineState::SubroutineState(SubroutineKind kind, std::size_t arms) : kind_(kind), arms_(arms) {
    if (arms == 0) throw InputError("a bandit subroutine needs at least one arm");
}

std::size_t SubroutineState::next_arm() const {
    const std::size_t n = arms_.size();
    if (kind_ == SubroutineKind::UniformExplore)
        return static_cast<std::size_t>(total_pulls_ % static_cast<std::int64_t>(n));

    for (std::size_t i = 0; i < n; ++i)
        if (!arms_[i].pulled()) return i;

    const double log_term = 2.0 * std::log(static_cast<double>(total_pulls_) + 1.0);
    std::size_t best = 0;
    double best_index = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const auto count = static_cast<double>(arms_[i].pull_count);
        const double index = arms_[i].reward_sum / count + std::sqrt(log_term / count);
        if (index > best_index) {
            best_index = index;
            best = i;
        }
    }
    return best;
}

void SubroutineState::observe(std::size_t arm, double reward) {
    if (arm >= arms_.size()) throw InputError("arm index out of range");
    if (!(reward >= 0.0 && reward <= 1.0)) throw InputError("reward must lie in [0, 1]");
    arms_[arm].pull_count += 1;
    arms_[arm].reward_sum += reward;
    total_pulls_ += 1;
}

std::size_t SubroutineState::recommend() const {
    std::size_t best = 0;
    double best_mean = -INFINITY;
    for (std::size_t i = 0; i < arms_.size(); ++i) {
        if (!arms_[i].pulled()) continue;
        const double mean = arms_[i].empirical_mean();
        if (mean > best_mean) {
            best_mean = mean;
            best = i;
        }
    }
    return best;
}

} // namespace ctxband
