#pragma once

// Reward-generating environments. An Instance pairs the true population
// distribution with per-(treatment, subpopulation) reward distributions,
// either Bernoulli with explicit means or a replay pool of historical
// rewards sampled uniformly with replacement.
//
// Indices are 0-based in this API; files and reports use 1-based indices.

#include "ctxband/allocation.hpp"
#include "ctxband/rng.hpp"
#include "ctxband/sampling.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace ctxband {

enum class RewardModel { Bernoulli, Replay };

class Instance {
public:
    /// means[i][j] = mu_{i,j}, n rows (treatments) of k columns.
    static Instance bernoulli(PopulationDistribution p, const std::vector<std::vector<double>>& means);

    /// pools[i][j] holds the historical rewards of cell (i, j); every cell
    /// must be non-empty and every reward in [0, 1].
    static Instance replay(PopulationDistribution p, std::vector<std::vector<std::vector<double>>> pools);

    std::size_t n() const { return n_; }
    std::size_t k() const { return population_.size(); }
    RewardModel model() const { return model_; }
    const PopulationDistribution& population() const { return population_; }
    double mean(std::size_t i, std::size_t j) const { return means_[i * k() + j]; }
    std::vector<std::vector<double>> means_matrix() const;
    std::span<const double> pool(std::size_t i, std::size_t j) const { return pools_[i * k() + j]; }

    double best_mean(std::size_t j) const;
    /// Lowest-index maximizer of mu_{., j}.
    std::size_t optimal_arm(std::size_t j) const;
    bool is_optimal(std::size_t i, std::size_t j) const { return mean(i, j) == best_mean(j); }

    std::size_t sample_context(Rng& rng) const { return contexts_.draw(rng); }
    double sample_reward(std::size_t i, std::size_t j, Rng& rng) const;

private:
    Instance(PopulationDistribution p, std::size_t n);

    std::size_t n_;
    PopulationDistribution population_;
    RewardModel model_ = RewardModel::Bernoulli;
    std::vector<double> means_;                // row-major n x k
    std::vector<std::vector<double>> pools_;   // replay only, row-major n x k
    CategoricalSampler contexts_;
};

/// Lower-bound family member: mu_{0,j} = 1/2 + delta_j,
/// mu_{b_j,j} = 1/2 + 2 delta_j omega_j, all other arms 1/2.
/// Requires delta_j in (0, 1/4] and b_j in [1, n).
Instance make_hard_family_member(std::size_t n, const PopulationDistribution& p,
                                 std::span<const double> deltas, std::span<const std::size_t> alternatives,
                                 std::span<const int> omega);

/// Gap used by the synthetic generator: min(sqrt(n / T) p_j^{-1/3}, 1/2).
double synthetic_gap(std::size_t n, std::int64_t horizon, double weight);

/// One uniformly random arm per subpopulation gets mean 1/2 + synthetic_gap,
/// every other arm 1/2.
Instance make_synthetic_worstcase(std::size_t n, const PopulationDistribution& p, std::int64_t horizon, Rng& rng);

/// (1 - eps, eps / (k - 1), ...) with eps = (k - 1)^{-1/2}. k >= 3: at k = 2
/// the first weight is zero.
PopulationDistribution make_skewed_p(std::size_t k);

struct ReplayRecord {
    std::size_t treatment;
    std::size_t subpopulation;
    double reward;
};

struct RewardScale {
    std::optional<double> min;
    std::optional<double> max;
};

/// Parses the replay CSV format:
///
///     # reward_min=1
///     # reward_max=5
///     treatment,subpopulation,reward
///     1,1,4
///
/// Indices in the file are 1-based. When a scale is known (from the
/// directives, overridden by `overrides`), rewards are mapped to
/// (r - min) / (max - min). Without a scale every reward must be in [0, 1].
std::vector<ReplayRecord> parse_replay_csv(std::istream& in, const RewardScale& overrides = {});

/// Builds a replay instance: n and k are the largest observed indices plus
/// one, p the subpopulation record frequencies, mu the cell averages.
/// Throws InputError listing every missing (treatment, subpopulation) cell.
Instance load_replay(std::span<const ReplayRecord> records);

} // namespace ctxband
