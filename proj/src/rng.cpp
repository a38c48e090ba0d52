#include "ctxband/rng.hpp"

namespace ctxband {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
}

Rng::Rng(std::uint64_t seed, Stream stream) {
    // Mix the stream tag through a separate SplitMix64 step so that
    // (seed, stream) pairs do not collide for neighbouring seeds.
    std::uint64_t tag = static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL;
    std::uint64_t mixed = splitmix64(tag) ^ seed;
    std::uint64_t sm = mixed;
    for (auto& word : s_) word = splitmix64(sm);
}

Rng::Rng(std::uint64_t seed, Stream stream, std::uint64_t index) : Rng(seed, stream) {
    std::uint64_t base = next();
    std::uint64_t sm = splitmix64(base) ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

} // namespace ctxband
