#include "doctest.h"

#include "ctxband/error.hpp"
#include "ctxband/rng.hpp"
#include "ctxband/sampling.hpp"

#include <array>
#include <cmath>
#include <vector>

using namespace ctxband;

TEST_CASE("splitmix64 reference sequence") {
    std::uint64_t state = 1234567;
    const std::array<std::uint64_t, 5> expected{6457827717110365317ULL, 3203168211198807973ULL,
                                                9817491932198370423ULL, 4593380528125082431ULL,
                                                16408922859458223821ULL};
    for (auto e : expected) CHECK(splitmix64(state) == e);
}

TEST_CASE("xoshiro256** seeded through splitmix64") {
    Rng rng(42);
    const std::array<std::uint64_t, 5> expected{1546998764402558742ULL, 6990951692964543102ULL,
                                                12544586762248559009ULL, 17057574109182124193ULL,
                                                18295552978065317476ULL};
    for (auto e : expected) CHECK(rng.next() == e);

    Rng again(42);
    CHECK(again.uniform() == 0.08386297105988216);
    CHECK(again.uniform() == 0.3789802506626686);
}

TEST_CASE("streams are distinct and reproducible") {
    Rng a(7, Stream::Context), b(7, Stream::Reward), c(7, Stream::Context), d(8, Stream::Context);
    const auto va = a.next();
    CHECK(va == c.next());
    CHECK(va != b.next());
    CHECK(va != d.next());
}

TEST_CASE("uniform and below stay in range") {
    Rng rng(1, Stream::Test);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 3 * std::sqrt(1.0 / 12 / 100000));

    std::array<int, 7> hist{};
    for (int i = 0; i < 70000; ++i) {
        const auto x = rng.below(7);
        REQUIRE(x < 7);
        ++hist[x];
    }
    for (int h : hist) CHECK(std::abs(h - 10000) < 4 * std::sqrt(70000 * (1.0 / 7) * (6.0 / 7)));
    CHECK(rng.below(1) == 0);
}

TEST_CASE("categorical sampler") {
    Rng rng(3, Stream::Test);

    SUBCASE("single weight") {
        const std::vector<double> w{1.0};
        CategoricalSampler s(w);
        for (int i = 0; i < 100; ++i) CHECK(s.draw(rng) == 0);
    }

    SUBCASE("zero weights are never drawn") {
        const std::vector<double> w{0.0, 0.5, 0.0, 0.5, 0.0};
        CategoricalSampler s(w);
        for (int i = 0; i < 10000; ++i) {
            const auto j = s.draw(rng);
            REQUIRE((j == 1 || j == 3));
        }
    }

    SUBCASE("frequencies") {
        const std::vector<double> w{0.8, 0.2};
        CategoricalSampler s(w);
        const int draws = 100000;
        int first = 0;
        for (int i = 0; i < draws; ++i) first += s.draw(rng) == 0;
        CHECK(std::abs(first / double(draws) - 0.8) < 3 * std::sqrt(0.16 / draws));
    }

    SUBCASE("rejects bad weights") {
        CHECK_THROWS_AS(CategoricalSampler(std::vector<double>{}), InputError);
        CHECK_THROWS_AS(CategoricalSampler(std::vector<double>{0.0, 0.0}), InputError);
        CHECK_THROWS_AS(CategoricalSampler(std::vector<double>{0.5, -0.1}), InputError);
    }
}

TEST_CASE("indexed substreams") {
    Rng a(5, Stream::Reward, 0), b(5, Stream::Reward, 0), c(5, Stream::Reward, 1), d(6, Stream::Reward, 0);
    const auto va = a.next();
    CHECK(va == b.next());
    CHECK(va != c.next());
    CHECK(va != d.next());
    Rng plain(5, Stream::Reward);
    CHECK(Rng(5, Stream::Reward, 0).next() != plain.next());
}
