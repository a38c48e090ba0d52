#include "ctxband/environments.hpp"

#include "ctxband/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>
#include <string>

namespace ctxband {

Instance::Instance(PopulationDistribution p, std::size_t n)
    : n_(n), population_(std::move(p)), contexts_(population_.weights()) {
    if (n_ == 0) throw InputError("an instance needs at least one treatment");
}

Instance Instance::bernoulli(PopulationDistribution p, const std::vector<std::vector<double>>& means) {
    Instance inst(std::move(p), means.size());
    const std::size_t k = inst.k();
    inst.means_.reserve(inst.n_ * k);
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (means[i].size() != k) throw InputError("every row of the mean matrix needs one entry per subpopulation");
        for (double m : means[i]) {
            if (!(m >= 0.0 && m <= 1.0)) throw InputError("Bernoulli means must lie in [0, 1]");
            inst.means_.push_back(m);
        }
    }
    return inst;
}

Instance Instance::replay(PopulationDistribution p, std::vector<std::vector<std::vector<double>>> pools) {
    Instance inst(std::move(p), pools.size());
    inst.model_ = RewardModel::Replay;
    const std::size_t k = inst.k();
    for (std::size_t i = 0; i < pools.size(); ++i) {
        if (pools[i].size() != k) throw InputError("every treatment needs one reward pool per subpopulation");
        for (std::size_t j = 0; j < k; ++j) {
            auto& cell = pools[i][j];
            if (cell.empty()) {
                std::ostringstream os;
                os << "replay cell (treatment " << i + 1 << ", subpopulation " << j + 1 << ") has no records";
                throw InputError(os.str());
            }
            for (double r : cell)
                if (!(r >= 0.0 && r <= 1.0)) throw InputError("replay rewards must lie in [0, 1]");
            inst.means_.push_back(std::accumulate(cell.begin(), cell.end(), 0.0) / static_cast<double>(cell.size()));
            inst.pools_.push_back(std::move(cell));
        }
    }
    return inst;
}

std::vector<std::vector<double>> Instance::means_matrix() const {
    std::vector<std::vector<double>> out(n_, std::vector<double>(k()));
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < k(); ++j) out[i][j] = mean(i, j);
    return out;
}

double Instance::best_mean(std::size_t j) const { return mean(optimal_arm(j), j); }

std::size_t Instance::optimal_arm(std::size_t j) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n_; ++i)
        if (mean(i, j) > mean(best, j)) best = i;
    return best;
}

double Instance::sample_reward(std::size_t i, std::size_t j, Rng& rng) const {
    if (model_ == RewardModel::Bernoulli) return rng.uniform() < mean(i, j) ? 1.0 : 0.0;
    const auto& cell = pools_[i * k() + j];
    return cell[rng.below(cell.size())];
}

// ---------------------------------------------------------------------------
// Generators

Instance make_hard_family_member(std::size_t n, const PopulationDistribution& p,
                                 std::span<const double> deltas, std::span<const std::size_t> alternatives,
                                 std::span<const int> omega) {
    const std::size_t k = p.size();
    if (n < 2) throw InputError("hard family needs at least two treatments");
    if (deltas.size() != k || alternatives.size() != k || omega.size() != k)
        throw InputError("hard family parameters need one entry per subpopulation");
    std::vector<std::vector<double>> means(n, std::vector<double>(k, 0.5));
    for (std::size_t j = 0; j < k; ++j) {
        if (!(deltas[j] > 0.0 && deltas[j] <= 0.25)) throw InputError("hard family gaps must lie in (0, 1/4]");
        if (alternatives[j] == 0 || alternatives[j] >= n)
            throw InputError("hard family alternative arm must differ from the first arm and exist");
        if (omega[j] != 0 && omega[j] != 1) throw InputError("hard family omega must be a bit vector");
        means[0][j] = 0.5 + deltas[j];
        means[alternatives[j]][j] = 0.5 + 2.0 * deltas[j] * omega[j];
    }
    return Instance::bernoulli(p, means);
}

double synthetic_gap(std::size_t n, std::int64_t horizon, double weight) {
    if (horizon < 1) throw InputError("synthetic instance needs horizon >= 1");
    const double raw = std::sqrt(static_cast<double>(n) / static_cast<double>(horizon)) / std::cbrt(weight);
    return std::min(raw, 0.5);
}

Instance make_synthetic_worstcase(std::size_t n, const PopulationDistribution& p, std::int64_t horizon, Rng& rng) {
    if (n < 2) throw InputError("synthetic instance needs at least two treatments");
    std::vector<std::vector<double>> means(n, std::vector<double>(p.size(), 0.5));
    for (std::size_t j = 0; j < p.size(); ++j) {
        const auto best = static_cast<std::size_t>(rng.below(n));
        means[best][j] = 0.5 + synthetic_gap(n, horizon, p[j]);
    }
    return Instance::bernoulli(p, means);
}

PopulationDistribution make_skewed_p(std::size_t k) {
    if (k < 3) throw InputError("skewed population needs k >= 3 (k = 2 gives a zero weight)");
    const double rest = static_cast<double>(k - 1);
    const double eps = 1.0 / std::sqrt(rest);
    std::vector<double> w(k, eps / rest);
    w[0] = 1.0 - eps;
    return PopulationDistribution::normalized(std::move(w));
}

// ---------------------------------------------------------------------------
// Replay data

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, std::size_t line, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InputError("line " + std::to_string(line) + ": invalid " + what + " '" + text + "'");
    }
}

std::size_t parse_index(const std::string& text, std::size_t line, const char* what) {
    const double v = parse_number(text, line, what);
    if (v < 1.0 || v != std::floor(v))
        throw InputError("line " + std::to_string(line) + ": " + what + " must be a positive integer (1-based)");
    return static_cast<std::size_t>(v) - 1;
}

} // namespace

std::vector<ReplayRecord> parse_replay_csv(std::istream& in, const RewardScale& overrides) {
    RewardScale scale;
    std::vector<ReplayRecord> records;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = trim(body.substr(0, eq));
            const std::string value = trim(body.substr(eq + 1));
            if (key == "reward_min") scale.min = parse_number(value, line_no, "reward_min");
            else if (key == "reward_max") scale.max = parse_number(value, line_no, "reward_max");
            continue;
        }
        if (!header_seen) {
            if (line != "treatment,subpopulation,reward")
                throw InputError("line " + std::to_string(line_no) +
                                 ": expected header 'treatment,subpopulation,reward'");
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (fields.size() != 3) throw InputError("line " + std::to_string(line_no) + ": expected 3 fields");
        records.push_back({parse_index(fields[0], line_no, "treatment"),
                           parse_index(fields[1], line_no, "subpopulation"),
                           parse_number(fields[2], line_no, "reward")});
    }
    if (!header_seen) throw InputError("replay file has no header line");

    if (overrides.min) scale.min = overrides.min;
    if (overrides.max) scale.max = overrides.max;
    if (scale.min.has_value() != scale.max.has_value())
        throw InputError("reward rescaling needs both reward_min and reward_max");
    if (scale.min) {
        const double lo = *scale.min;
        const double hi = *scale.max;
        if (!(hi > lo)) throw InputError("reward_max must exceed reward_min");
        for (auto& r : records) r.reward = (r.reward - lo) / (hi - lo);
    }
    for (const auto& r : records)
        if (!(r.reward >= 0.0 && r.reward <= 1.0))
            throw InputError("replay reward outside [0, 1]; declare reward_min/reward_max to rescale");
    return records;
}

Instance load_replay(std::span<const ReplayRecord> records) {
    if (records.empty()) throw InputError("replay data contains no records");
    std::size_t n = 0;
    std::size_t k = 0;
    for (const auto& r : records) {
        n = std::max(n, r.treatment + 1);
        k = std::max(k, r.subpopulation + 1);
        if (!(r.reward >= 0.0 && r.reward <= 1.0)) throw InputError("replay rewards must lie in [0, 1]");
    }

    std::vector<std::vector<std::vector<double>>> pools(n, std::vector<std::vector<double>>(k));
    std::vector<double> frequency(k, 0.0);
    for (const auto& r : records) {
        pools[r.treatment][r.subpopulation].push_back(r.reward);
        frequency[r.subpopulation] += 1.0;
    }

    std::vector<std::string> missing_groups;
    for (std::size_t j = 0; j < k; ++j)
        if (frequency[j] == 0.0) missing_groups.push_back(std::to_string(j + 1));
    if (!missing_groups.empty()) {
        std::string msg = "replay data has subpopulations with no records:";
        for (const auto& g : missing_groups) msg += " " + g;
        throw InputError(msg);
    }

    std::string missing;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (pools[i][j].empty()) missing += " (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
    if (!missing.empty()) throw InputError("replay data is missing (treatment,subpopulation) cells:" + missing);

    const auto total = static_cast<double>(records.size());
    for (auto& f : frequency) f /= total;
    return Instance::replay(PopulationDistribution::normalized(std::move(frequency)), std::move(pools));
}

} // namespace ctxband
