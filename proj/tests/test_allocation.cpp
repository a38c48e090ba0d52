#include "doctest.h"

#include "ctxband/allocation.hpp"
#include "ctxband/environments.hpp"
#include "ctxband/error.hpp"
#include "test_support.hpp"

#include <cmath>
#include <vector>

using namespace ctxband;
using ctxband::testing::random_population;
using ctxband::testing::random_size;

namespace {

const std::vector<double> kPair{0.8, 0.2};

// Reference values from a 50-digit evaluation.
constexpr double kPairNormTwoThirds = 1.3207322048468059;
constexpr double kPairPassive = 1.3416407864998738;
constexpr double kPairQ0 = 0.71589634658334991;
constexpr double kPairQ1 = 0.28410365341665009;
constexpr double kPairAlphaMin = 0.10512956677081262;
constexpr double kPairGap = 1.0158310530903524;
constexpr double kPairThreshold005 = 0.70176425717108786;

double passive_value(const PopulationDistribution& p) { return std::sqrt(lp_quasi_norm(p.weights(), 0.5)); }
double active_value(const PopulationDistribution& p) { return lp_quasi_norm(p.weights(), 2.0 / 3.0); }

} // namespace

TEST_CASE("population distribution validation") {
    CHECK_NOTHROW(PopulationDistribution({0.3, 0.7}));
    CHECK_THROWS_AS(PopulationDistribution({}), InputError);
    CHECK_THROWS_AS(PopulationDistribution({0.0, 1.0}), InputError);
    CHECK_THROWS_AS(PopulationDistribution({-0.1, 1.1}), InputError);
    CHECK_THROWS_AS(PopulationDistribution({0.5, 0.4}), InputError);
    CHECK_NOTHROW(PopulationDistribution({0.5, 0.5 + 5e-13}));

    const auto p = PopulationDistribution::normalized({2.0, 6.0});
    CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(PopulationDistribution::normalized({1.0, 0.0}), InputError);
    CHECK(PopulationDistribution::uniform(4).is_uniform());
}

TEST_CASE("lp quasi-norm") {
    for (double r : {0.5, 2.0 / 3.0, 1.0}) CHECK(lp_quasi_norm(std::vector<double>{1.0}, r) == doctest::Approx(1.0));
    CHECK(lp_quasi_norm(std::vector<double>{0.5, 0.5}, 2.0 / 3.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(lp_quasi_norm(kPair, 0.5) == doctest::Approx(1.8).epsilon(1e-14));
    CHECK(lp_quasi_norm(std::vector<double>{0.0, 0.0}, 0.5) == 0.0);
    CHECK_THROWS_AS(lp_quasi_norm(kPair, 0.0), InputError);
    CHECK_THROWS_AS(lp_quasi_norm(kPair, -1.0), InputError);
    CHECK_THROWS_AS(lp_quasi_norm(kPair, 1.5), InputError);
    CHECK_THROWS_AS(lp_quasi_norm(std::vector<double>{0.5, -0.5}, 0.5), InputError);
}

TEST_CASE("s_value") {
    for (std::size_t k : {1u, 2u, 5u, 16u}) {
        const auto p = PopulationDistribution::uniform(k);
        CHECK(s_value(p, Allocation(std::vector<double>(p.weights().begin(), p.weights().end()))) ==
              doctest::Approx(std::sqrt(double(k))).epsilon(1e-14));
    }
    const PopulationDistribution p(kPair);
    CHECK(s_value(p, Allocation({0.5, 0.5})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(s_value(p, Allocation(kPair)) == doctest::Approx(kPairPassive).epsilon(1e-15));
    CHECK(s_value(p, Allocation(kPair)) == doctest::Approx(passive_value(p)).epsilon(1e-15));

    try {
        s_value(p, Allocation({1.0, 0.0}));
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("infinite objective") != std::string::npos);
    }
    CHECK_THROWS_AS(s_value(p, std::vector<double>{1.0}), InputError);
}

TEST_CASE("optimal active allocation") {
    SUBCASE("uniform") {
        const auto p = PopulationDistribution::uniform(6);
        const auto q = optimal_active_allocation(p);
        for (std::size_t j = 0; j < 6; ++j) CHECK(q[j] == doctest::Approx(1.0 / 6).epsilon(1e-14));
        CHECK(s_value(p, q) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));
    }
    SUBCASE("two subpopulations") {
        const PopulationDistribution p(kPair);
        const auto q = optimal_active_allocation(p);
        CHECK(std::abs(q[0] - kPairQ0) < 1e-15);
        CHECK(std::abs(q[1] - kPairQ1) < 1e-15);
        CHECK(std::abs(s_value(p, q) - kPairNormTwoThirds) < 1e-14);

        const auto grid = grid_oracle_allocation(p, 1e-4);
        CHECK(std::abs(grid[0] - q[0]) <= 2e-4);
        CHECK(std::abs(grid[1] - q[1]) <= 2e-4);
    }
    SUBCASE("three subpopulations against the grid") {
        const PopulationDistribution p({0.5, 0.25, 0.25});
        const auto q = optimal_active_allocation(p);
        const double z = std::cbrt(0.25) + 2 * std::cbrt(0.0625);
        CHECK(q[0] == doctest::Approx(std::cbrt(0.25) / z).epsilon(1e-14));
        const auto grid = grid_oracle_allocation(p, 1e-3);
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(grid[j] - q[j]) <= 1e-3);
    }
}

TEST_CASE("budgeted allocation examples") {
    SUBCASE("uniform pair is optimal at every budget") {
        const PopulationDistribution p({0.5, 0.5});
        for (double alpha : {0.0, 0.1, 0.5, 1.0}) {
            const auto sol = budgeted_allocation(p, alpha);
            CHECK(sol.allocation[0] == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(sol.objective_value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
            CHECK(sol.budget == alpha);
        }
    }
    SUBCASE("budget above alpha_min recovers the active optimum") {
        const auto sol = budgeted_allocation(PopulationDistribution(kPair), 0.5);
        CHECK(std::abs(sol.allocation[0] - kPairQ0) < 1e-12);
        CHECK(std::abs(sol.allocation[1] - kPairQ1) < 1e-12);
        CHECK(sol.binding_set.empty());
    }
    SUBCASE("binding budget") {
        const PopulationDistribution p(kPair);
        const auto sol = budgeted_allocation(p, 0.05);
        CHECK(std::abs(sol.allocation[0] - 0.76) < 1e-12);
        CHECK(std::abs(sol.allocation[1] - 0.24) < 1e-12);
        CHECK(std::abs(sol.threshold - kPairThreshold005) < 1e-12);
        REQUIRE(sol.binding_set.size() == 1);
        CHECK(sol.binding_set[0] == 0);
        CHECK(std::abs(threshold_function(p, 0.95, sol.threshold) - 1.0) <= 1e-12);

        const auto grid = grid_oracle_allocation(p, 1e-4, std::vector<double>{0.76, 0.19});
        CHECK(std::abs(grid[0] - 0.76) <= 2e-4);
        CHECK(std::abs(grid[1] - 0.24) <= 2e-4);
    }
    SUBCASE("no budget") {
        const PopulationDistribution p(kPair);
        const auto sol = budgeted_allocation(p, 0.0);
        CHECK(sol.allocation[0] == 0.8);
        CHECK(sol.allocation[1] == 0.2);
        CHECK(std::abs(sol.objective_value - kPairPassive) < 1e-14);
        CHECK(std::abs(threshold_function(p, 1.0, sol.threshold) - 1.0) <= 1e-12);
    }
    SUBCASE("budget out of range") {
        const PopulationDistribution p(kPair);
        CHECK_THROWS_AS(budgeted_allocation(p, -0.01), InputError);
        CHECK_THROWS_AS(budgeted_allocation(p, 1.01), InputError);
        CHECK_THROWS_AS(budgeted_allocation(p, std::nan("")), InputError);
    }
}

TEST_CASE("alpha_min and active-passive gap") {
    CHECK(alpha_min(PopulationDistribution::uniform(7)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(alpha_min(PopulationDistribution({1.0})) == 0.0);
    CHECK(std::abs(alpha_min(PopulationDistribution(kPair)) - kPairAlphaMin) < 1e-14);

    CHECK(std::abs(active_passive_gap(PopulationDistribution::uniform(9)) - 1.0) < 1e-12);
    CHECK(std::abs(active_passive_gap(PopulationDistribution(kPair)) - kPairGap) < 1e-14);

    const auto skewed = make_skewed_p(17);
    const double gap = active_passive_gap(skewed);
    CHECK(gap >= 2.0 / std::sqrt(8.0));
    CHECK(gap >= 1.0);
    CHECK(gap == doctest::Approx(1.16202045).epsilon(1e-8));
    CHECK(alpha_min(skewed) == doctest::Approx(0.39706744).epsilon(1e-8));
    CHECK(alpha_min(make_skewed_p(5)) == doctest::Approx(0.22702358).epsilon(1e-8));
    CHECK(active_passive_gap(make_skewed_p(5)) == doctest::Approx(1.01939061).epsilon(1e-8));
}

TEST_CASE("grid oracle") {
    const PopulationDistribution half({0.5, 0.5});
    const auto q = grid_oracle_allocation(half, 1e-3);
    CHECK(q[0] == 0.5);
    CHECK(q[1] == 0.5);

    CHECK_THROWS_AS(grid_oracle_allocation(PopulationDistribution::uniform(5), 0.1), InputError);
    CHECK_THROWS_AS(grid_oracle_allocation(half, 0.5), InputError);
    CHECK_THROWS_AS(grid_oracle_allocation(half, 1e-5), InputError);
    CHECK_THROWS_AS(grid_oracle_allocation(half, 0.01, std::vector<double>{0.6, 0.6}), InputError);
    CHECK_THROWS_AS(grid_oracle_allocation(half, 0.01, std::vector<double>{0.6}), InputError);

    try {
        grid_oracle_allocation(PopulationDistribution::uniform(5), 0.1);
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("oracle scale exceeded") != std::string::npos);
    }

    SUBCASE("ties go to the lexicographically smallest point") {
        // Eleven grid steps cannot split evenly; (5, 6) and (6, 5) tie.
        const auto t = grid_oracle_allocation(half, 1.0 / 11);
        CHECK(t[0] == 5.0 / 11);
        CHECK(t[1] == 6.0 / 11);
    }
}

TEST_CASE("grid search methods agree") {
    Rng rng(11, Stream::Test);
    for (int trial = 0; trial < 200; ++trial) {
        const auto k = random_size(rng, 2, 4);
        const auto p = random_population(rng, k);
        std::optional<std::vector<double>> floor;
        if (trial % 2 == 1) {
            floor.emplace(k);
            for (std::size_t j = 0; j < k; ++j) (*floor)[j] = 0.7 * p[j];
        }
        const auto a = detail::grid_search(p, 0.02, floor, detail::GridMethod::Exhaustive);
        const auto b = detail::grid_search(p, 0.02, floor, detail::GridMethod::PairReduced);
        for (std::size_t j = 0; j < k; ++j) REQUIRE(a[j] == b[j]);
    }
}

TEST_CASE("optimality against every grid point") {
    Rng rng(12, Stream::Test);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto k = random_size(rng, 2, 4);
        const auto p = random_population(rng, k);
        const auto q = optimal_active_allocation(p);
        const double best = s_value(p, q);
        REQUIRE(std::abs(best - active_value(p)) <= 1e-9);
        const auto grid = grid_oracle_allocation(p, 1e-2);
        REQUIRE(best <= s_value(p, grid) + 1e-12);
    }
}

TEST_CASE("gap bounds and interpolation") {
    Rng rng(13, Stream::Test);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto k = random_size(rng, 1, 64);
        const auto p = random_population(rng, k);
        const double gap = active_passive_gap(p);
        REQUIRE(gap >= 1.0 - 1e-12);
        REQUIRE(gap <= std::pow(double(k), 0.25) + 1e-12);
        REQUIRE(active_value(p) <= passive_value(p) * (1 + 1e-12));
    }
    for (std::size_t k = 3; k <= 50; ++k)
        CHECK(active_passive_gap(make_skewed_p(k)) >= std::pow(double(k - 1), 0.25) / std::sqrt(8.0));
}

TEST_CASE("budgeted program properties") {
    Rng rng(14, Stream::Test);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto k = random_size(rng, 1, 30);
        const auto p = random_population(rng, k);
        const double amin = alpha_min(p);
        const auto free = optimal_active_allocation(p);

        double previous = INFINITY;
        for (int step = 0; step <= 10; ++step) {
            const double alpha = step / 10.0;
            const auto sol = budgeted_allocation(p, alpha);
            const double c = sol.threshold;
            REQUIRE(std::abs(threshold_function(p, 1 - alpha, c) - 1.0) <= 1e-10);
            REQUIRE(std::abs(sol.objective_value - s_value(p, sol.allocation)) <= 1e-9);
            for (std::size_t j = 0; j < k; ++j) {
                const double q = sol.allocation[j];
                const double passive = (1 - alpha) * p[j];
                REQUIRE(q >= passive - 1e-10);
                const double active = c * std::cbrt(p[j] * p[j]);
                REQUIRE(std::min(std::abs(q - passive), std::abs(q - active)) <= 1e-9);
            }
            REQUIRE(sol.objective_value <= previous + 1e-12);
            previous = sol.objective_value;

            if (alpha >= amin) {
                for (std::size_t j = 0; j < k; ++j) REQUIRE(std::abs(sol.allocation[j] - free[j]) <= 1e-9);
                REQUIRE(std::abs(sol.objective_value - active_value(p)) <= 1e-9);
            }
        }
        REQUIRE(std::abs(budgeted_allocation(p, 0.0).objective_value - passive_value(p)) <= 1e-9);
        REQUIRE(std::abs(budgeted_allocation(p, 1.0).objective_value - active_value(p)) <= 1e-9);

        // Just below and at alpha_min.
        const auto at = budgeted_allocation(p, amin);
        REQUIRE(std::abs(at.objective_value - active_value(p)) <= 1e-9);
        if (amin > 1e-3) {
            const auto below = budgeted_allocation(p, amin * 0.5);
            REQUIRE(below.objective_value > active_value(p) - 1e-12);
        }
    }
}

TEST_CASE("threshold function shape") {
    Rng rng(15, Stream::Test);
    for (int trial = 0; trial < 300; ++trial) {
        const auto k = random_size(rng, 1, 20);
        const auto p = random_population(rng, k);
        const double alpha = rng.uniform();
        const double s = 1 - alpha;
        CHECK(threshold_function(p, s, 0.0) == doctest::Approx(s).epsilon(1e-12));

        const double top = 2 * std::cbrt(p.max()) / std::cbrt(p.min() * p.min());
        double previous = threshold_function(p, s, 0.0);
        for (int i = 1; i <= 400; ++i) {
            const double c = top * i / 400.0;
            const double f = threshold_function(p, s, c);
            REQUIRE(f >= previous);
            // Continuity: slope bounded by sum_j p_j^{2/3}.
            REQUIRE(f - previous <= (top / 400.0) * std::pow(lp_quasi_norm(p.weights(), 2.0 / 3.0), 2.0 / 3.0) * (1 + 1e-9));
            previous = f;
        }
        REQUIRE(threshold_function(p, s, top) > 1.0);

        const double start = std::cbrt(p.min());
        for (int i = 0; i < 50; ++i) {
            const double c = start + i * 0.05;
            REQUIRE(threshold_function(p, s, c + 1e-3) > threshold_function(p, s, c));
        }
    }
}
