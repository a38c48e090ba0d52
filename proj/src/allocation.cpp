#include "ctxband/allocation.hpp"

#include "ctxband/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ctxband {

namespace {

double two_thirds_power(double x) { return std::cbrt(x * x); }

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void renormalize(std::vector<double>& v) {
    const double total = sum_of(v);
    for (auto& x : v) x /= total;
}

} // namespace

// ---------------------------------------------------------------------------
// PopulationDistribution / Allocation

PopulationDistribution::PopulationDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
    if (weights_.empty()) throw InputError("population distribution needs at least one subpopulation");
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j])) {
            std::ostringstream os;
            os << "population weight " << (j + 1) << " must be strictly positive, got " << weights_[j];
            throw InputError(os.str());
        }
    }
    const double total = sum_of(weights_);
    if (std::abs(total - 1.0) > kSumTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "population weights must sum to 1, got " << total;
        throw InputError(os.str());
    }
}

PopulationDistribution PopulationDistribution::normalized(std::vector<double> weights) {
    const double total = sum_of(weights);
    if (!(total > 0.0) || !std::isfinite(total))
        throw InputError("population weights must have a positive finite sum");
    for (auto& w : weights) w /= total;
    return PopulationDistribution(std::move(weights));
}

PopulationDistribution PopulationDistribution::uniform(std::size_t k) {
    if (k == 0) throw InputError("population distribution needs at least one subpopulation");
    return PopulationDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

double PopulationDistribution::min() const { return *std::min_element(weights_.begin(), weights_.end()); }

double PopulationDistribution::max() const { return *std::max_element(weights_.begin(), weights_.end()); }

bool PopulationDistribution::is_uniform(double tolerance) const {
    return max() - min() <= tolerance;
}

Allocation::Allocation(std::vector<double> proportions) : proportions_(std::move(proportions)) {
    if (proportions_.empty()) throw InputError("allocation must be non-empty");
    for (double x : proportions_)
        if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("allocation entries must be nonnegative");
    if (std::abs(sum_of(proportions_) - 1.0) > kSumTolerance)
        throw InputError("allocation must sum to 1");
}

// ---------------------------------------------------------------------------
// Closed forms

double lp_quasi_norm(std::span<const double> v, double r) {
    if (!(r > 0.0) || r > 1.0) throw InputError("quasi-norm exponent must lie in (0, 1]");
    double acc = 0.0;
    for (double x : v) {
        if (x < 0.0) throw InputError("quasi-norm requires nonnegative entries");
        acc += std::pow(x, r);
    }
    if (acc == 0.0) return 0.0;
    return std::pow(acc, 1.0 / r);
}

double s_value(const PopulationDistribution& p, std::span<const double> q) {
    if (q.size() != p.size()) throw InputError("allocation and population sizes differ");
    double acc = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (q[j] < 0.0) throw InputError("allocation entries must be nonnegative");
        if (q[j] == 0.0) throw InputError("infinite objective: zero allocation for a subpopulation with positive weight");
        acc += p[j] / std::sqrt(q[j]);
    }
    return acc;
}

double s_value(const PopulationDistribution& p, const Allocation& q) {
    return s_value(p, q.proportions());
}

Allocation optimal_active_allocation(const PopulationDistribution& p) {
    std::vector<double> q(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) q[j] = two_thirds_power(p[j]);
    renormalize(q);
    return Allocation(std::move(q));
}

double alpha_min(const PopulationDistribution& p) {
    double total = 0.0;
    for (double w : p.weights()) total += two_thirds_power(w);
    const double value = 1.0 - 1.0 / (std::cbrt(p.max()) * total);
    return std::clamp(value, 0.0, std::nextafter(1.0, 0.0));
}

double active_passive_gap(const PopulationDistribution& p) {
    const double passive = std::sqrt(lp_quasi_norm(p.weights(), 0.5));
    const double active = lp_quasi_norm(p.weights(), 2.0 / 3.0);
    return passive / active;
}

// ---------------------------------------------------------------------------
// Budgeted program

double threshold_function(const PopulationDistribution& p, double passive_fraction, double c) {
    double acc = 0.0;
    for (double w : p.weights()) acc += std::max(passive_fraction * w, c * two_thirds_power(w));
    return acc;
}

BudgetSolution threshold_allocation(const PopulationDistribution& p, double passive_fraction) {
    if (!(passive_fraction >= 0.0 && passive_fraction <= 1.0))
        throw InputError("passive fraction must lie in [0, 1]");
    const std::size_t k = p.size();
    const double budget = 1.0 - passive_fraction;

    std::vector<double> powers(k);
    for (std::size_t j = 0; j < k; ++j) powers[j] = two_thirds_power(p[j]);

    auto finish = [&](std::vector<double> q, double c) {
        renormalize(q);
        std::vector<std::size_t> binding;
        for (std::size_t j = 0; j < k; ++j)
            if (passive_fraction * p[j] >= c * powers[j]) binding.push_back(j);
        const double objective = s_value(p, q);
        return BudgetSolution{Allocation(std::move(q)), c, objective, budget, std::move(binding)};
    };

    // No active rounds: the feasible set is the single point q = p. Any
    // c in (0, p_min^{1/3}] satisfies F(c) = 1; report the largest.
    if (passive_fraction == 1.0) {
        std::vector<double> q(p.weights().begin(), p.weights().end());
        return finish(std::move(q), std::cbrt(p.min()));
    }

    // Unconstrained optimum already feasible.
    const double power_sum = std::accumulate(powers.begin(), powers.end(), 0.0);
    const double c_free = 1.0 / power_sum;
    bool feasible = true;
    for (std::size_t j = 0; j < k; ++j)
        if (c_free * powers[j] < passive_fraction * p[j]) feasible = false;
    if (feasible) {
        std::vector<double> q(k);
        for (std::size_t j = 0; j < k; ++j) q[j] = c_free * powers[j];
        return finish(std::move(q), c_free);
    }

    // F is continuous, nondecreasing, F(0) = 1 - alpha < 1 and F(hi) > 1.
    double lo = 0.0;
    double hi = 2.0 * std::cbrt(p.max()) / two_thirds_power(p.min());
    double c = hi;
    for (int iter = 0; iter < 200; ++iter) {
        c = 0.5 * (lo + hi);
        const double f = threshold_function(p, passive_fraction, c);
        if (std::abs(f - 1.0) <= 1e-12) break;
        (f < 1.0 ? lo : hi) = c;
    }

    // F is linear on the piece containing the root; solve it exactly there
    // and keep the result only if it stays on the same piece.
    double binding_mass = 0.0;
    double free_power = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        if (passive_fraction * p[j] >= c * powers[j]) binding_mass += p[j];
        else free_power += powers[j];
    }
    if (free_power > 0.0) {
        const double exact = (1.0 - passive_fraction * binding_mass) / free_power;
        bool same_piece = true;
        for (std::size_t j = 0; j < k; ++j) {
            const bool was_binding = passive_fraction * p[j] >= c * powers[j];
            const bool is_binding = passive_fraction * p[j] >= exact * powers[j];
            if (was_binding != is_binding) same_piece = false;
        }
        if (same_piece) c = exact;
    }

    std::vector<double> q(k);
    for (std::size_t j = 0; j < k; ++j) q[j] = std::max(passive_fraction * p[j], c * powers[j]);
    return finish(std::move(q), c);
}

BudgetSolution budgeted_allocation(const PopulationDistribution& p, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("budget alpha must lie in [0, 1]");
    BudgetSolution solution = threshold_allocation(p, 1.0 - alpha);
    solution.budget = alpha;
    return solution;
}

// ---------------------------------------------------------------------------
// Grid oracle

namespace {

struct GridSearch {
    const PopulationDistribution& p;
    long total;                 // grid points per unit
    std::vector<long> lower;    // minimum count per coordinate
    std::vector<long> current;
    std::vector<long> best;
    double best_value = INFINITY;
    std::vector<double> root; // root[c] = sqrt(c / total)

    void build_table() {
        root.resize(static_cast<std::size_t>(total) + 1);
        for (long c = 0; c <= total; ++c)
            root[static_cast<std::size_t>(c)] = std::sqrt(static_cast<double>(c) / static_cast<double>(total));
    }

    double value_of(const std::vector<long>& counts) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < counts.size(); ++j) acc += p[j] / root[static_cast<std::size_t>(counts[j])];
        return acc;
    }

    void offer() {
        const double v = value_of(current);
        if (v < best_value) {
            best_value = v;
            best = current;
        }
    }

    long tail_lower(std::size_t from) const {
        long acc = 0;
        for (std::size_t j = from; j < lower.size(); ++j) acc += lower[j];
        return acc;
    }

    // Visit every composition in lexicographic order.
    void exhaustive(std::size_t j, long remaining) {
        const std::size_t k = lower.size();
        if (j + 1 == k) {
            if (remaining < lower[j]) return;
            current[j] = remaining;
            offer();
            return;
        }
        const long reserve = tail_lower(j + 1);
        for (long c = lower[j]; c + reserve <= remaining; ++c) {
            current[j] = c;
            exhaustive(j + 1, remaining - c);
        }
    }

    // Enumerate all but the last two coordinates; the last pair objective
    // p_a / sqrt(x) + p_b / sqrt(m - x) is strictly convex in x, so its
    // smallest integer minimizer is found by bisection on the forward
    // difference, then confirmed against its neighbours in ascending order.
    void reduced(std::size_t j, long remaining) {
        const std::size_t k = lower.size();
        if (j + 2 == k) {
            long lo = lower[j];
            long hi = remaining - lower[j + 1];
            if (lo > hi) return;
            const double pa = p[j];
            const double pb = p[j + 1];
            auto pair = [&](long x) {
                return pa / root[static_cast<std::size_t>(x)] + pb / root[static_cast<std::size_t>(remaining - x)];
            };
            long a = lo;
            long b = hi;
            while (a < b) {
                const long mid = a + (b - a) / 2;
                if (pair(mid + 1) - pair(mid) >= 0.0) b = mid;
                else a = mid + 1;
            }
            for (long x = std::max(lo, a - 1); x <= std::min(hi, a + 1); ++x) {
                current[j] = x;
                current[j + 1] = remaining - x;
                offer();
            }
            return;
        }
        const long reserve = tail_lower(j + 1);
        for (long c = lower[j]; c + reserve <= remaining; ++c) {
            current[j] = c;
            reduced(j + 1, remaining - c);
        }
    }
};

double binomial(long n, long r) {
    double acc = 1.0;
    for (long i = 1; i <= r; ++i) acc = acc * static_cast<double>(n - r + i) / static_cast<double>(i);
    return acc;
}

} // namespace

namespace detail {

Allocation grid_search(const PopulationDistribution& p, double resolution,
                       const std::optional<std::vector<double>>& floor, GridMethod method) {
    const std::size_t k = p.size();
    if (k > 4) throw InputError("oracle scale exceeded: grid oracle supports at most 4 subpopulations");
    if (!(resolution >= 1e-4 - 1e-15 && resolution <= 1e-1 + 1e-15))
        throw InputError("grid resolution must lie in [1e-4, 1e-1]");
    if (floor && floor->size() != k) throw InputError("floor vector length differs from population size");

    const long total = std::lround(1.0 / resolution);
    GridSearch search{p, total, std::vector<long>(k, 1), std::vector<long>(k, 0), {}, INFINITY, {}};
    search.build_table();
    if (floor) {
        for (std::size_t j = 0; j < k; ++j) {
            const long needed = static_cast<long>(std::ceil((*floor)[j] * static_cast<double>(total) - 1e-9));
            search.lower[j] = std::max(search.lower[j], needed);
        }
    }

    if (method == GridMethod::Exhaustive || k < 2) search.exhaustive(0, total);
    else search.reduced(0, total);

    if (search.best.empty()) throw InputError("grid oracle: feasible grid is empty");
    std::vector<double> q(k);
    for (std::size_t j = 0; j < k; ++j)
        q[j] = static_cast<double>(search.best[j]) / static_cast<double>(total);
    return Allocation(std::move(q));
}

} // namespace detail

Allocation grid_oracle_allocation(const PopulationDistribution& p, double resolution,
                                  const std::optional<std::vector<double>>& floor) {
    auto method = detail::GridMethod::Exhaustive;
    if (resolution >= 1e-4 - 1e-15 && resolution <= 1e-1 + 1e-15) {
        const auto k = static_cast<long>(p.size());
        const long total = std::lround(1.0 / resolution);
        if (binomial(total + k - 1, k - 1) > 2e6) method = detail::GridMethod::PairReduced;
    }
    return detail::grid_search(p, resolution, floor, method);
}

} // namespace ctxband
