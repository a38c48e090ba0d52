#pragma once

// Experiment configuration: where instances come from, which policy runs,
// horizon, number of Monte-Carlo runs and the base seed. Loaded from a
// single JSON document; CLI flags override fields afterwards and the fully
// resolved configuration is echoed into every report.

#include "ctxband/environments.hpp"
#include "ctxband/policies.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ctxband {

/// Fresh worst-case instance per run (optimal arms drawn from the run seed).
struct SyntheticSource {
    std::size_t n = 5;
    std::string population_label; // "skewed", "uniform" or "explicit"
    PopulationDistribution population;
};

/// Fixed member of the lower-bound family. With `delta_scale` the gaps are
/// min(scale * sqrt(n / T) p_j^{-1/3}, 1/4) for the configured horizon.
struct HardFamilySource {
    std::size_t n = 2;
    PopulationDistribution population;
    std::optional<std::vector<double>> deltas;
    std::optional<double> delta_scale;
    std::vector<std::size_t> alternatives; // 0-based, each >= 1
    std::vector<int> omega;
};

/// A single pre-built instance (instance JSON file or replay CSV).
struct FixedSource {
    std::string kind; // "file" or "replay"
    std::string path;
    RewardScale scale;
    std::shared_ptr<const Instance> instance;
};

using InstanceSource = std::variant<SyntheticSource, HardFamilySource, FixedSource>;

struct PolicySpec {
    PolicyKind kind = PolicyKind::Passive;
    std::optional<double> alpha;
    SubroutineKind subroutine = SubroutineKind::UCB;
};

struct ExperimentConfig {
    InstanceSource source;
    PolicySpec policy;
    std::int64_t horizon = 0;
    std::int64_t runs = 1;
    std::uint64_t base_seed = 0;
    std::optional<std::string> output_path;

    std::size_t k() const;
    std::size_t n() const;
    /// Throws InputError unless runs >= 1 and horizon >= k.
    void validate() const;
};

/// Relative paths inside the document resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

nlohmann::json to_json(const ExperimentConfig& config);

/// The instance episode `seed` runs against.
std::shared_ptr<const Instance> instance_for_run(const ExperimentConfig& config, std::uint64_t seed);

/// Policy configuration with known_p filled from the instance.
PolicyConfig resolve_policy(const PolicySpec& spec, const Instance& instance);

/// Population given as "skewed", "uniform" or an explicit weight array.
PopulationDistribution parse_population(const nlohmann::json& value, std::size_t k, std::string& label);

// Instance JSON: {"n", "k", "p", "means" (n rows of k), "model", "pools" (replay only)}.
nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);

} // namespace ctxband
