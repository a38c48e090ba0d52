#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ctxband {

/// Streams derived from one episode seed. Each purpose gets an independent
/// generator so that, e.g., reward noise never perturbs the context sequence.
enum class Stream : std::uint64_t {
    Context = 1,
    Reward = 2,
    Instance = 3,
    Test = 99,
};

std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** seeded through SplitMix64. Bit-reproducible on every
/// platform; all derived distributions below are implemented here rather
/// than through <random> distributions, whose output is library-specific.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, Stream stream);
    /// Substream `index` of (seed, stream), e.g. one per reward cell.
    Rng(std::uint64_t seed, Stream stream, std::uint64_t index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next(); }
    result_type next();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

private:
    std::array<std::uint64_t, 4> s_{};
};

} // namespace ctxband
