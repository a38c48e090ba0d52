#include "ctxband/policies.hpp"

#include "ctxband/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ctxband {

PolicyKind parse_policy_kind(std::string_view name) {
    if (name == "passive") return PolicyKind::Passive;
    if (name == "active-known-p") return PolicyKind::KnownPActive;
    if (name == "budgeted") return PolicyKind::BudgetedActive;
    if (name == "uniform-active") return PolicyKind::UniformActiveAgnostic;
    if (name == "eetc") return PolicyKind::EETC;
    throw InputError("unknown policy '" + std::string(name) +
                     "' (expected passive, active-known-p, budgeted, uniform-active or eetc)");
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::Passive: return "passive";
    case PolicyKind::KnownPActive: return "active-known-p";
    case PolicyKind::BudgetedActive: return "budgeted";
    case PolicyKind::UniformActiveAgnostic: return "uniform-active";
    case PolicyKind::EETC: return "eetc";
    }
    return "passive";
}

void PolicyConfig::validate() const {
    const bool needs_p = kind == PolicyKind::KnownPActive || kind == PolicyKind::BudgetedActive;
    if (needs_p && !known_p)
        throw InputError("policy '" + std::string(to_string(kind)) + "' requires a known population distribution");
    if (kind == PolicyKind::BudgetedActive) {
        if (!budget_alpha) throw InputError("policy 'budgeted' requires a budget alpha");
        if (!(*budget_alpha >= 0.0 && *budget_alpha <= 1.0)) throw InputError("budget alpha must lie in [0, 1]");
    }
}

std::int64_t budgeted_passive_rounds(double alpha, std::int64_t horizon) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("budget alpha must lie in [0, 1]");
    const double exact = (1.0 - alpha) * static_cast<double>(horizon);
    const auto rounds = static_cast<std::int64_t>(std::floor(exact + 1e-9));
    return std::clamp<std::int64_t>(rounds, 0, horizon);
}

// ---------------------------------------------------------------------------

namespace {

// r_j = (q_j - s p_j) / (1 - s); clipped at zero against rounding.
std::vector<double> active_component(const PopulationDistribution& p, const Allocation& q,
                                     double passive_fraction) {
    std::vector<double> r(p.size());
    const double active_fraction = 1.0 - passive_fraction;
    for (std::size_t j = 0; j < p.size(); ++j)
        r[j] = std::max(0.0, (q[j] - passive_fraction * p[j]) / active_fraction);
    return r;
}

} // namespace

CommitPlan commit_plan(const PopulationDistribution& estimate, std::int64_t passive_rounds,
                       std::int64_t horizon) {
    if (horizon <= 0 || passive_rounds < 0 || passive_rounds >= horizon)
        throw InputError("commit plan needs 0 <= passive rounds < horizon");
    const double s = static_cast<double>(passive_rounds) / static_cast<double>(horizon);
    BudgetSolution solution = threshold_allocation(estimate, s);
    std::vector<double> r = active_component(estimate, solution.allocation, s);
    return CommitPlan{std::move(solution), std::move(r)};
}

EetcState::EetcState(std::size_t k, std::int64_t horizon)
    : counts_(k, 0), horizon_(horizon),
      threshold_(horizon > 0 ? std::log(static_cast<double>(k)) + 2.0 * std::log(static_cast<double>(horizon))
                             : 0.0) {
    if (k == 0) throw InputError("EETC needs at least one subpopulation");
    if (horizon < 0) throw InputError("EETC horizon must be nonnegative");
}

void EetcState::on_passive_observation(std::size_t j) {
    if (committed()) throw RuntimeError("EETC received a passive observation after committing");
    if (j >= counts_.size()) throw InputError("subpopulation index out of range");
    counts_[j] += 1;
    t_ += 1;

    if (!tau1_) {
        const auto smallest = *std::min_element(counts_.begin(), counts_.end());
        if (static_cast<double>(smallest) >= threshold_) tau1_ = t_;
        return;
    }
    if (t_ < *tau1_ + 1) return;

    std::vector<double> estimate(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i)
        estimate[i] = static_cast<double>(counts_[i]) / static_cast<double>(t_);
    if (std::any_of(estimate.begin(), estimate.end(), [](double x) { return x <= 0.0; })) return;
    const double budget_needed = alpha_min(PopulationDistribution::normalized(std::move(estimate)));
    if (static_cast<double>(t_) / static_cast<double>(horizon_) > 1.0 - budget_needed) commit(j);
}

void EetcState::commit(std::size_t last_context) {
    tau2_ = t_;
    std::vector<double> previous(counts_.size());
    const auto denom = static_cast<double>(t_ - 1);
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        auto c = counts_[i] - (i == last_context ? 1 : 0);
        previous[i] = static_cast<double>(c) / denom;
    }
    frozen_ = PopulationDistribution::normalized(std::move(previous));
    if (t_ < horizon_) {
        CommitPlan plan = commit_plan(*frozen_, t_, horizon_);
        solution_ = std::move(plan.solution);
        sampler_ = std::move(plan.active);
    } else {
        solution_ = threshold_allocation(*frozen_, 1.0);
    }
}

// ---------------------------------------------------------------------------

ContextPolicy::ContextPolicy(const PolicyConfig& config, std::size_t k, std::size_t n,
                             std::optional<std::int64_t> horizon)
    : config_(config) {
    config_.validate();
    if (k == 0) throw InputError("policy needs at least one subpopulation");
    if (config_.known_p && config_.known_p->size() != k)
        throw InputError("known population distribution has the wrong number of subpopulations");
    if (horizon && *horizon < 0) throw InputError("horizon must be nonnegative");
    subroutines_.assign(k, SubroutineState(config_.subroutine_kind, n));

    switch (config_.kind) {
    case PolicyKind::Passive: break;
    case PolicyKind::KnownPActive:
        sampler_ = CategoricalSampler(optimal_active_allocation(*config_.known_p).proportions());
        break;
    case PolicyKind::UniformActiveAgnostic:
        sampler_ = CategoricalSampler(std::vector<double>(k, 1.0));
        break;
    case PolicyKind::BudgetedActive: {
        if (!horizon) throw InputError("budgeted policy requires the horizon up front");
        const double alpha = *config_.budget_alpha;
        passive_rounds_ = budgeted_passive_rounds(alpha, *horizon);
        if (alpha > 0.0) {
            const BudgetSolution solution = budgeted_allocation(*config_.known_p, alpha);
            sampler_ = CategoricalSampler(active_component(*config_.known_p, solution.allocation, 1.0 - alpha));
        }
        break;
    }
    case PolicyKind::EETC:
        if (!horizon) throw InputError("EETC requires the horizon up front");
        eetc_.emplace(k, *horizon);
        break;
    }
}

ContextDecision ContextPolicy::decide_context(std::int64_t t, Rng& rng) {
    switch (config_.kind) {
    case PolicyKind::Passive: return ContextDecision::passive();
    case PolicyKind::KnownPActive:
    case PolicyKind::UniformActiveAgnostic: return ContextDecision::active(sampler_.draw(rng));
    case PolicyKind::BudgetedActive:
        if (t <= passive_rounds_) return ContextDecision::passive();
        return ContextDecision::active(sampler_.draw(rng));
    case PolicyKind::EETC:
        if (!eetc_sampler_) return ContextDecision::passive();
        return ContextDecision::active(eetc_sampler_->draw(rng));
    }
    return ContextDecision::passive();
}

void ContextPolicy::on_passive_observation(std::size_t j) {
    if (j >= subroutines_.size()) throw InputError("subpopulation index out of range");
    if (!eetc_ || eetc_->committed()) return;
    eetc_->on_passive_observation(j);
    if (eetc_->active_sampler()) eetc_sampler_ = CategoricalSampler(*eetc_->active_sampler());
}

std::vector<std::size_t> ContextPolicy::finalize() const {
    std::vector<std::size_t> out(subroutines_.size());
    std::transform(subroutines_.begin(), subroutines_.end(), out.begin(),
                   [](const SubroutineState& s) { return s.recommend(); });
    return out;
}

} // namespace ctxband
