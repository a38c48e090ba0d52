#pragma once

// Episode driver and Monte-Carlo runner.
//
// Episode r of an experiment (r = 1..R) uses seed base_seed + r, from which
// independent context, reward and instance streams are derived. Rewards come
// from one stream per (treatment, subpopulation) cell, so two configurations
// with the same base seed see identical reward sequences in every cell and
// their runs are paired.
//
// run_experiment distributes episodes over OpenMP threads;
// run_experiment_serial is the single-threaded reference. Both collect
// results in run order and return bit-identical reports.

#include "ctxband/config.hpp"
#include "ctxband/environments.hpp"
#include "ctxband/policies.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ctxband {

struct EpisodeResult {
    std::vector<std::size_t> recommendations;
    std::vector<std::int64_t> context_counts;
    std::int64_t active_round_count = 0;
    std::optional<std::int64_t> eetc_tau1;
    std::optional<std::int64_t> eetc_tau2;
    std::uint64_t seed = 0;
};

/// One round of an episode, recorded when run_episode is given a trace.
struct RoundTrace {
    std::int64_t t;
    ContextDecision decision;
    std::size_t context;
    std::size_t arm;
    double reward;
};

EpisodeResult run_episode(const Instance& instance, const PolicyConfig& config, std::int64_t horizon,
                          std::uint64_t seed, std::vector<RoundTrace>* trace = nullptr);

/// sum_j p_j (max_i mu_{i,j} - mu_{rec_j, j}).
double simple_regret(const Instance& instance, std::span<const std::size_t> recommendations);

struct RunRecord {
    EpisodeResult episode;
    double regret = 0.0;
};

struct RegretReport {
    double mean_regret = 0.0;
    double ci_halfwidth = 0.0; // 1.96 sd / sqrt(R), sample sd; 0 when R = 1
    std::int64_t runs = 0;
    std::vector<double> per_run_regrets;
    std::vector<RunRecord> records;
    nlohmann::json config_echo;
};

/// Mean and normal-approximation 95% half-width of `values`.
std::pair<double, double> mean_and_ci(std::span<const double> values);

/// One episode of `config` with seed base_seed + run (run is 1-based).
RunRecord run_single(const ExperimentConfig& config, std::int64_t run);

RegretReport run_experiment(const ExperimentConfig& config);
RegretReport run_experiment_serial(const ExperimentConfig& config);

struct SweepPoint {
    double x; // alpha or horizon
    RegretReport report;
};

/// Budgeted policy at each alpha, all sharing the base seed.
std::vector<SweepPoint> sweep_budget(const ExperimentConfig& base, std::span<const double> alphas);

/// Same configuration at several horizons, sharing the base seed.
std::vector<SweepPoint> sweep_horizon(const ExperimentConfig& base, std::span<const std::int64_t> horizons);

} // namespace ctxband
