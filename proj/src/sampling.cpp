#include "ctxband/sampling.hpp"

#include "ctxband/error.hpp"

#include <algorithm>

namespace ctxband {

CategoricalSampler::CategoricalSampler(std::span<const double> weights) : cumulative_(weights.size()) {
    if (weights.empty()) throw InputError("categorical sampler needs at least one weight");
    double acc = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (!(weights[j] >= 0.0)) throw InputError("categorical weights must be nonnegative");
        acc += weights[j];
        cumulative_[j] = acc;
        if (weights[j] > 0.0) {
            last_positive_ = j;
            any = true;
        }
    }
    if (!any) throw InputError("categorical weights must not all be zero");
    for (auto& c : cumulative_) c /= acc;
}

std::size_t CategoricalSampler::draw(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto j = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(j, last_positive_);
}

} // namespace ctxband
