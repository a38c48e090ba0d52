#pragma once

// Allocation of sampling effort across subpopulations.
//
// For a population distribution p and an allocation q (expected fraction of
// rounds spent in each subpopulation), the worst-case simple regret of a
// history-free policy scales with
//
//     S_p(q) = sum_j p_j / sqrt(q_j).
//
// Fully active policies minimize S_p over the simplex (q_j ∝ p_j^{2/3});
// passive policies are stuck at q = p. With an intervention budget alpha the
// allocation must keep q_j >= (1 - alpha) p_j, and the minimizer has the
// threshold form q_j = max((1 - alpha) p_j, c* p_j^{2/3}) with c* the root
// of F(c) = sum_j max((1 - alpha) p_j, c p_j^{2/3}) = 1.
//
// All functions are pure; indices are 0-based.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ctxband {

/// Strictly positive weights over k >= 1 subpopulations summing to one.
class PopulationDistribution {
public:
    static constexpr double kSumTolerance = 1e-12;

    /// Throws InputError unless every weight is > 0 and the sum is 1 within
    /// kSumTolerance.
    explicit PopulationDistribution(std::vector<double> weights);

    /// Divides by the sum first. Still rejects zero or negative weights.
    static PopulationDistribution normalized(std::vector<double> weights);

    static PopulationDistribution uniform(std::size_t k);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t j) const { return weights_[j]; }
    std::span<const double> weights() const { return weights_; }
    double min() const;
    double max() const;
    bool is_uniform(double tolerance = 1e-15) const;

    bool operator==(const PopulationDistribution&) const = default;

private:
    std::vector<double> weights_;
};

/// Nonnegative proportions summing to one (within 1e-10).
class Allocation {
public:
    static constexpr double kSumTolerance = 1e-10;

    explicit Allocation(std::vector<double> proportions);

    std::size_t size() const { return proportions_.size(); }
    double operator[](std::size_t j) const { return proportions_[j]; }
    std::span<const double> proportions() const { return proportions_; }

private:
    std::vector<double> proportions_;
};

struct BudgetSolution {
    Allocation allocation;
    double threshold;        // c*
    double objective_value;  // S_p(allocation)
    double budget;           // alpha
    std::vector<std::size_t> binding_set; // j with q_j = (1 - alpha) p_j
};

/// (sum_j v_j^r)^{1/r} for r in (0, 1].
double lp_quasi_norm(std::span<const double> v, double r);

/// S_p(q). Throws InputError ("infinite objective") when some q_j is zero.
double s_value(const PopulationDistribution& p, const Allocation& q);
double s_value(const PopulationDistribution& p, std::span<const double> q);

/// Unconstrained minimizer of S_p: q_j = p_j^{2/3} / sum_l p_l^{2/3}.
Allocation optimal_active_allocation(const PopulationDistribution& p);

/// F(c) = sum_j max(passive_fraction * p_j, c * p_j^{2/3}).
double threshold_function(const PopulationDistribution& p, double passive_fraction, double c);

/// Minimizes S_p(q) subject to q_j >= passive_fraction * p_j. The budget
/// reported in the solution is 1 - passive_fraction.
BudgetSolution threshold_allocation(const PopulationDistribution& p, double passive_fraction);

/// threshold_allocation with passive fraction 1 - alpha. alpha in [0, 1].
BudgetSolution budgeted_allocation(const PopulationDistribution& p, double alpha);

/// Smallest budget for which the budgeted optimum equals the fully active one.
double alpha_min(const PopulationDistribution& p);

/// R(p) = ||p||_{1/2}^{1/2} / ||p||_{2/3}. Always in [1, k^{1/4}].
double active_passive_gap(const PopulationDistribution& p);

/// Brute-force reference minimizer of S_p over the simplex grid with step
/// `resolution`, optionally restricted to q_j >= floor_j. Ties go to the
/// lexicographically smallest grid point. Only for k <= 4.
Allocation grid_oracle_allocation(const PopulationDistribution& p, double resolution,
                                  const std::optional<std::vector<double>>& floor = std::nullopt);

namespace detail {
// Grid search with an explicit method: full enumeration, or enumeration of
// all but the last two coordinates plus a convex line search over the last
// pair. grid_oracle_allocation picks one by grid size.
enum class GridMethod { Exhaustive, PairReduced };
Allocation grid_search(const PopulationDistribution& p, double resolution,
                       const std::optional<std::vector<double>>& floor, GridMethod method);
} // namespace detail

} // namespace ctxband
