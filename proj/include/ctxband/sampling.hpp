#pragma once

#include "ctxband/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ctxband {

/// Inverse-CDF sampler over a fixed probability vector (normalized on
/// construction). Zero-probability entries are never returned.
class CategoricalSampler {
public:
    CategoricalSampler() = default;
    explicit CategoricalSampler(std::span<const double> weights);

    std::size_t draw(Rng& rng) const;
    std::size_t size() const { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
    std::size_t last_positive_ = 0;
};

} // namespace ctxband
