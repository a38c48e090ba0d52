#include "ctxband/harness.hpp"

#include "ctxband/error.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <string>

namespace ctxband {

EpisodeResult run_episode(const Instance& instance, const PolicyConfig& config, std::int64_t horizon,
                          std::uint64_t seed, std::vector<RoundTrace>* trace) {
    if (horizon < 0) throw InputError("horizon must be nonnegative");
    const std::size_t k = instance.k();
    ContextPolicy policy(config, k, instance.n(), horizon);

    Rng context_rng(seed, Stream::Context);
    // One reward stream per (treatment, subpopulation) cell: the m-th pull
    // of a cell sees the same reward under every policy run with this seed.
    std::vector<Rng> reward_rngs;
    reward_rngs.reserve(instance.n() * k);
    for (std::size_t cell = 0; cell < instance.n() * k; ++cell) reward_rngs.emplace_back(seed, Stream::Reward, cell);
    EpisodeResult result;
    result.seed = seed;
    result.context_counts.assign(k, 0);

    for (std::int64_t t = 1; t <= horizon; ++t) {
        const ContextDecision decision = policy.decide_context(t, context_rng);
        std::size_t j;
        if (decision.is_active()) {
            j = *decision.target;
            ++result.active_round_count;
        } else {
            j = instance.sample_context(context_rng);
            policy.on_passive_observation(j);
        }
        SubroutineState& sub = policy.subroutine(j);
        const std::size_t arm = sub.next_arm();
        const double reward = instance.sample_reward(arm, j, reward_rngs[arm * k + j]);
        sub.observe(arm, reward);
        ++result.context_counts[j];
        if (trace) trace->push_back({t, decision, j, arm, reward});
    }

    result.recommendations = policy.finalize();
    if (const EetcState* eetc = policy.eetc()) {
        result.eetc_tau1 = eetc->tau1();
        result.eetc_tau2 = eetc->tau2();
    }
    return result;
}

double simple_regret(const Instance& instance, std::span<const std::size_t> recommendations) {
    if (recommendations.size() != instance.k()) throw InputError("one recommendation per subpopulation is required");
    double regret = 0.0;
    for (std::size_t j = 0; j < instance.k(); ++j) {
        if (recommendations[j] >= instance.n()) throw InputError("recommended treatment out of range");
        regret += instance.population()[j] * (instance.best_mean(j) - instance.mean(recommendations[j], j));
    }
    return regret;
}

std::pair<double, double> mean_and_ci(std::span<const double> values) {
    if (values.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double v : values) sum += v;
    const auto count = static_cast<double>(values.size());
    const double mean = sum / count;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (count - 1.0));
    return {mean, 1.96 * sd / std::sqrt(count)};
}

RunRecord run_single(const ExperimentConfig& config, std::int64_t run) {
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(run);
    const auto instance = instance_for_run(config, seed);
    const PolicyConfig policy = resolve_policy(config.policy, *instance);
    RunRecord record;
    record.episode = run_episode(*instance, policy, config.horizon, seed);
    record.regret = simple_regret(*instance, record.episode.recommendations);
    return record;
}

namespace {

RegretReport summarize(const ExperimentConfig& config, std::vector<RunRecord> records) {
    RegretReport report;
    report.runs = static_cast<std::int64_t>(records.size());
    report.per_run_regrets.reserve(records.size());
    for (const auto& r : records) report.per_run_regrets.push_back(r.regret);
    std::tie(report.mean_regret, report.ci_halfwidth) = mean_and_ci(report.per_run_regrets);
    report.records = std::move(records);
    report.config_echo = to_json(config);
    return report;
}

[[noreturn]] void rethrow_with_run(std::exception_ptr error, std::int64_t run) {
    const std::string prefix = "run " + std::to_string(run) + ": ";
    try {
        std::rethrow_exception(error);
    } catch (const InputError& e) {
        throw InputError(prefix + e.what());
    } catch (const std::exception& e) {
        throw RuntimeError(prefix + e.what());
    }
}

} // namespace

RegretReport run_experiment_serial(const ExperimentConfig& config) {
    config.validate();
    std::vector<RunRecord> records;
    records.reserve(static_cast<std::size_t>(config.runs));
    for (std::int64_t r = 1; r <= config.runs; ++r) {
        try {
            records.push_back(run_single(config, r));
        } catch (...) {
            rethrow_with_run(std::current_exception(), r);
        }
    }
    return summarize(config, std::move(records));
}

RegretReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto runs = static_cast<std::size_t>(config.runs);
    std::vector<RunRecord> records(runs);
    std::vector<std::exception_ptr> errors(runs);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < config.runs; ++r) {
        try {
            records[static_cast<std::size_t>(r)] = run_single(config, r + 1);
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }

    for (std::size_t r = 0; r < runs; ++r)
        if (errors[r]) rethrow_with_run(errors[r], static_cast<std::int64_t>(r + 1));
    return summarize(config, std::move(records));
}

std::vector<SweepPoint> sweep_budget(const ExperimentConfig& base, std::span<const double> alphas) {
    if (base.policy.kind != PolicyKind::BudgetedActive) throw InputError("budget sweep requires the budgeted policy");
    std::vector<SweepPoint> out;
    for (double alpha : alphas) {
        ExperimentConfig config = base;
        config.policy.alpha = alpha;
        out.push_back({alpha, run_experiment(config)});
    }
    return out;
}

std::vector<SweepPoint> sweep_horizon(const ExperimentConfig& base, std::span<const std::int64_t> horizons) {
    std::vector<SweepPoint> out;
    for (auto horizon : horizons) {
        ExperimentConfig config = base;
        config.horizon = horizon;
        out.push_back({static_cast<double>(horizon), run_experiment(config)});
    }
    return out;
}

} // namespace ctxband
