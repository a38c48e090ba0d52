#pragma once

// Within-subpopulation simple-regret bandit algorithms. One instance runs
// per subpopulation; it only sees the rounds routed to that subpopulation,
// so it must be anytime (no knowledge of how many pulls it will get).

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ctxband {

enum class SubroutineKind { UniformExplore, UCB };

SubroutineKind parse_subroutine_kind(std::string_view name);
std::string_view to_string(SubroutineKind kind);

struct ArmStats {
    std::int64_t pull_count = 0;
    double reward_sum = 0.0;

    bool pulled() const { return pull_count > 0; }
    double empirical_mean() const { return reward_sum / static_cast<double>(pull_count); }
};

class SubroutineState {
public:
    SubroutineState(SubroutineKind kind, std::size_t arms);

    SubroutineKind kind() const { return kind_; }
    std::size_t arm_count() const { return arms_.size(); }
    const ArmStats& arm(std::size_t i) const { return arms_[i]; }
    std::int64_t total_pulls() const { return total_pulls_; }

    /// UniformExplore: round-robin, arm (total_pulls mod n).
    /// UCB: every unpulled arm once (lowest index first), then
    /// argmax mean_i + sqrt(2 ln(t + 1) / n_i) with t = total_pulls.
    std::size_t next_arm() const;

    /// Throws InputError for an arm out of range or a reward outside [0, 1].
    void observe(std::size_t arm, double reward);

    /// Empirical best arm among pulled arms; arm 0 if nothing was pulled.
    std::size_t recommend() const;

private:
    SubroutineKind kind_;
    std::vector<ArmStats> arms_;
    std::int64_t total_pulls_ = 0;
};

} // namespace ctxband
