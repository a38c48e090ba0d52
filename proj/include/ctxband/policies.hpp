#pragma once

// Subpopulation-selection policies. Each round the policy either lets the
// environment draw the context from p (passive) or picks it (active); the
// treatment is then chosen by the subroutine of that subpopulation.

#include "ctxband/allocation.hpp"
#include "ctxband/rng.hpp"
#include "ctxband/sampling.hpp"
#include "ctxband/subroutines.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace ctxband {

enum class PolicyKind { Passive, KnownPActive, BudgetedActive, UniformActiveAgnostic, EETC };

/// CLI/config names: passive, active-known-p, budgeted, uniform-active, eetc.
PolicyKind parse_policy_kind(std::string_view name);
std::string_view to_string(PolicyKind kind);

struct ContextDecision {
    enum class Mode { PassiveDraw, ActiveChoice };
    Mode mode = Mode::PassiveDraw;
    std::optional<std::size_t> target; // present iff ActiveChoice

    static ContextDecision passive() { return {Mode::PassiveDraw, std::nullopt}; }
    static ContextDecision active(std::size_t j) { return {Mode::ActiveChoice, j}; }
    bool is_active() const { return mode == Mode::ActiveChoice; }
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::Passive;
    std::optional<PopulationDistribution> known_p;
    std::optional<double> budget_alpha;
    SubroutineKind subroutine_kind = SubroutineKind::UCB;

    /// Throws InputError when a required field for `kind` is missing.
    void validate() const;
};

/// Passive-phase bookkeeping of Explore-Explore-Then-Commit. Rounds are
/// 1-based: after observing round t, counts sum to t.
class EetcState {
public:
    explicit EetcState(std::size_t k, std::int64_t horizon);

    /// Records the passively drawn context j of the next round. Sets tau1
    /// at the first round where every count reaches ln(k T^2); from round
    /// tau1 + 1 on, fires tau2 at the first t with t / T > 1 - alpha_min(p_hat_t),
    /// freezing p_hat at t - 1 and computing the active sampler.
    void on_passive_observation(std::size_t j);

    bool committed() const { return tau2_.has_value(); }
    std::int64_t round() const { return t_; }
    std::int64_t horizon() const { return horizon_; }
    double count_threshold() const { return threshold_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }
    std::optional<std::int64_t> tau1() const { return tau1_; }
    std::optional<std::int64_t> tau2() const { return tau2_; }
    const std::optional<PopulationDistribution>& frozen_estimate() const { return frozen_; }
    const std::optional<BudgetSolution>& frozen_solution() const { return solution_; }
    /// r, the distribution used in the active phase.
    const std::optional<std::vector<double>>& active_sampler() const { return sampler_; }

private:
    void commit(std::size_t last_context);

    std::vector<std::int64_t> counts_;
    std::int64_t t_ = 0;
    std::int64_t horizon_;
    double threshold_;
    std::optional<std::int64_t> tau1_;
    std::optional<std::int64_t> tau2_;
    std::optional<PopulationDistribution> frozen_;
    std::optional<BudgetSolution> solution_;
    std::optional<std::vector<double>> sampler_;
};

/// Active-phase distribution for a frozen estimate: with passive fraction
/// s = passive_rounds / T, q solves the threshold program with floor s p_hat
/// and r_j = (q_j - s p_hat_j) / (1 - s). Requires passive_rounds < T.
struct CommitPlan {
    BudgetSolution solution;
    std::vector<double> active;
};
CommitPlan commit_plan(const PopulationDistribution& estimate, std::int64_t passive_rounds,
                       std::int64_t horizon);

/// Policy state for one episode: the selection rule plus one subroutine per
/// subpopulation.
class ContextPolicy {
public:
    /// EETC and BudgetedActive require the horizon; the others accept std::nullopt.
    ContextPolicy(const PolicyConfig& config, std::size_t k, std::size_t n,
                  std::optional<std::int64_t> horizon);

    /// Decision for round t (1-based). Active choices consume `rng`.
    ContextDecision decide_context(std::int64_t t, Rng& rng);

    /// Must be called with the drawn context after every PassiveDraw.
    void on_passive_observation(std::size_t j);

    SubroutineState& subroutine(std::size_t j) { return subroutines_[j]; }
    const SubroutineState& subroutine(std::size_t j) const { return subroutines_[j]; }

    /// Recommended arm per subpopulation.
    std::vector<std::size_t> finalize() const;

    PolicyKind kind() const { return config_.kind; }
    std::size_t k() const { return subroutines_.size(); }
    /// Number of leading passive rounds for BudgetedActive, floor((1 - alpha) T).
    std::int64_t passive_rounds() const { return passive_rounds_; }
    const EetcState* eetc() const { return eetc_ ? &*eetc_ : nullptr; }

private:
    PolicyConfig config_;
    std::vector<SubroutineState> subroutines_;
    std::int64_t passive_rounds_ = 0;
    CategoricalSampler sampler_;
    std::optional<EetcState> eetc_;
    std::optional<CategoricalSampler> eetc_sampler_;
};

/// floor((1 - alpha) T), guarded against representation error in 1 - alpha.
std::int64_t budgeted_passive_rounds(double alpha, std::int64_t horizon);

} // namespace ctxband
