#include "ctxband/config.hpp"

#include "ctxband/error.hpp"

#include <cmath>
#include <fstream>

namespace ctxband {

using nlohmann::json;

namespace {

template <class T>
T get_field(const json& obj, const char* key, const char* context) {
    if (!obj.contains(key)) throw InputError(std::string(context) + ": missing field '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string(context) + ": field '" + key + "' has the wrong type");
    }
}

std::size_t positive_size(const json& obj, const char* key, const char* context) {
    const auto v = get_field<std::int64_t>(obj, key, context);
    if (v < 1) throw InputError(std::string(context) + ": '" + key + "' must be >= 1");
    return static_cast<std::size_t>(v);
}

std::vector<std::vector<double>> read_matrix(const json& value, const char* what) {
    try {
        return value.get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
        throw InputError(std::string(what) + " must be an array of numeric arrays");
    }
}

std::filesystem::path resolve_path(const std::string& path, const std::filesystem::path& base_dir) {
    std::filesystem::path p(path);
    if (p.is_relative() && !base_dir.empty()) return base_dir / p;
    return p;
}

json read_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open '" + file.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("'" + file.string() + "' is not valid JSON: " + e.what());
    }
}

std::vector<double> hard_family_deltas(const HardFamilySource& src, std::int64_t horizon) {
    if (src.deltas) return *src.deltas;
    std::vector<double> deltas(src.population.size());
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        const double raw = *src.delta_scale * std::sqrt(static_cast<double>(src.n) / static_cast<double>(horizon)) /
                           std::cbrt(src.population[j]);
        deltas[j] = std::min(raw, 0.25);
    }
    return deltas;
}

} // namespace

// ---------------------------------------------------------------------------
// Instance JSON

json instance_to_json(const Instance& instance) {
    json doc;
    doc["n"] = instance.n();
    doc["k"] = instance.k();
    doc["p"] = std::vector<double>(instance.population().weights().begin(), instance.population().weights().end());
    doc["means"] = instance.means_matrix();
    doc["model"] = instance.model() == RewardModel::Bernoulli ? "bernoulli" : "replay";
    if (instance.model() == RewardModel::Replay) {
        json pools = json::array();
        for (std::size_t i = 0; i < instance.n(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < instance.k(); ++j) {
                auto cell = instance.pool(i, j);
                row.push_back(std::vector<double>(cell.begin(), cell.end()));
            }
            pools.push_back(std::move(row));
        }
        doc["pools"] = std::move(pools);
    }
    return doc;
}

Instance instance_from_json(const json& doc) {
    const char* ctx = "instance";
    const auto n = positive_size(doc, "n", ctx);
    const auto k = positive_size(doc, "k", ctx);
    const auto p = get_field<std::vector<double>>(doc, "p", ctx);
    if (p.size() != k) throw InputError("instance: 'p' must have k entries");
    if (!doc.contains("means")) throw InputError("instance: missing field 'means'");
    const auto means = read_matrix(doc.at("means"), "instance 'means'");
    if (means.size() != n) throw InputError("instance: 'means' must have n rows");
    const auto model = doc.value("model", std::string("bernoulli"));

    if (model == "bernoulli") return Instance::bernoulli(PopulationDistribution(p), means);
    if (model != "replay") throw InputError("instance: 'model' must be bernoulli or replay");
    if (!doc.contains("pools")) throw InputError("instance: replay model requires 'pools'");
    std::vector<std::vector<std::vector<double>>> pools;
    try {
        pools = doc.at("pools").get<std::vector<std::vector<std::vector<double>>>>();
    } catch (const json::exception&) {
        throw InputError("instance: 'pools' must be an n x k array of reward arrays");
    }
    if (pools.size() != n) throw InputError("instance: 'pools' must have n rows");
    Instance inst = Instance::replay(PopulationDistribution(p), std::move(pools));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (std::abs(inst.mean(i, j) - means[i][j]) > 1e-12)
                throw InputError("instance: 'means' disagree with the replay pool averages");
    return inst;
}

// ---------------------------------------------------------------------------
// Experiment configuration

PopulationDistribution parse_population(const json& value, std::size_t k, std::string& label) {
    if (value.is_string()) {
        label = value.get<std::string>();
        if (label == "skewed") return make_skewed_p(k);
        if (label == "uniform") return PopulationDistribution::uniform(k);
        throw InputError("population must be 'skewed', 'uniform' or an array of weights");
    }
    label = "explicit";
    std::vector<double> w;
    try {
        w = value.get<std::vector<double>>();
    } catch (const json::exception&) {
        throw InputError("population must be 'skewed', 'uniform' or an array of weights");
    }
    if (k != 0 && w.size() != k) throw InputError("population array must have k entries");
    return PopulationDistribution(std::move(w));
}

std::size_t ExperimentConfig::k() const {
    return std::visit(
        [](const auto& src) -> std::size_t {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, FixedSource>) return src.instance->k();
            else return src.population.size();
        },
        source);
}

std::size_t ExperimentConfig::n() const {
    return std::visit(
        [](const auto& src) -> std::size_t {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, FixedSource>) return src.instance->n();
            else return src.n;
        },
        source);
}

void ExperimentConfig::validate() const {
    if (runs < 1) throw InputError("runs must be >= 1");
    if (horizon < static_cast<std::int64_t>(k())) throw InputError("horizon must be at least the number of subpopulations");
    if (policy.kind == PolicyKind::BudgetedActive && !policy.alpha)
        throw InputError("policy 'budgeted' requires 'alpha'");
    if (policy.alpha && !(*policy.alpha >= 0.0 && *policy.alpha <= 1.0))
        throw InputError("policy alpha must lie in [0, 1]");
    if (const auto* hard = std::get_if<HardFamilySource>(&source)) {
        // Throws on gaps outside (0, 1/4] at this horizon.
        const auto deltas = hard_family_deltas(*hard, horizon);
        make_hard_family_member(hard->n, hard->population, deltas, hard->alternatives, hard->omega);
    }
}

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw InputError("config must be a JSON object");
    if (!doc.contains("instance")) throw InputError("config: missing 'instance'");
    const json& inst = doc.at("instance");
    const auto kind = get_field<std::string>(inst, "source", "instance");

    auto make_source = [&]() -> InstanceSource {
        if (kind == "synthetic") {
            SyntheticSource src{positive_size(inst, "n", "instance"), {}, PopulationDistribution::uniform(1)};
            const std::size_t k = inst.contains("k") ? positive_size(inst, "k", "instance") : 0;
            if (!inst.contains("population")) throw InputError("instance: missing field 'population'");
            src.population = parse_population(inst.at("population"), k, src.population_label);
            return src;
        }
        if (kind == "hard-family") {
            HardFamilySource src{positive_size(inst, "n", "instance"),
                                 PopulationDistribution(get_field<std::vector<double>>(inst, "p", "instance")),
                                 std::nullopt, std::nullopt, {}, {}};
            if (inst.contains("deltas")) src.deltas = get_field<std::vector<double>>(inst, "deltas", "instance");
            if (inst.contains("delta_scale")) src.delta_scale = get_field<double>(inst, "delta_scale", "instance");
            if (src.deltas.has_value() == src.delta_scale.has_value())
                throw InputError("instance: hard-family needs exactly one of 'deltas' or 'delta_scale'");
            if (src.delta_scale && !(*src.delta_scale > 0.0)) throw InputError("instance: 'delta_scale' must be positive");
            for (auto b : get_field<std::vector<std::int64_t>>(inst, "alternatives", "instance")) {
                if (b < 2) throw InputError("instance: alternative arms are 1-based and must be >= 2");
                src.alternatives.push_back(static_cast<std::size_t>(b - 1));
            }
            src.omega = get_field<std::vector<int>>(inst, "omega", "instance");
            return src;
        }
        if (kind == "file") {
            const auto path = get_field<std::string>(inst, "path", "instance");
            auto instance = std::make_shared<const Instance>(instance_from_json(read_json_file(resolve_path(path, base_dir))));
            return FixedSource{kind, path, {}, std::move(instance)};
        }
        if (kind == "replay") {
            const auto path = get_field<std::string>(inst, "path", "instance");
            RewardScale scale;
            if (inst.contains("reward_min")) scale.min = get_field<double>(inst, "reward_min", "instance");
            if (inst.contains("reward_max")) scale.max = get_field<double>(inst, "reward_max", "instance");
            std::ifstream in(resolve_path(path, base_dir));
            if (!in) throw InputError("cannot open replay data '" + path + "'");
            const auto records = parse_replay_csv(in, scale);
            return FixedSource{kind, path, scale, std::make_shared<const Instance>(load_replay(records))};
        }
        throw InputError("instance: 'source' must be synthetic, hard-family, file or replay");
    };

    ExperimentConfig config{make_source(), {}, 0, 1, 0, std::nullopt};

    if (!doc.contains("policy")) throw InputError("config: missing 'policy'");
    const json& pol = doc.at("policy");
    config.policy.kind = parse_policy_kind(get_field<std::string>(pol, "name", "policy"));
    if (pol.contains("alpha")) config.policy.alpha = get_field<double>(pol, "alpha", "policy");
    if (pol.contains("subroutine"))
        config.policy.subroutine = parse_subroutine_kind(get_field<std::string>(pol, "subroutine", "policy"));

    config.horizon = get_field<std::int64_t>(doc, "horizon", "config");
    config.runs = doc.contains("runs") ? get_field<std::int64_t>(doc, "runs", "config") : 1;
    config.base_seed = doc.contains("seed") ? get_field<std::uint64_t>(doc, "seed", "config") : 0;
    if (doc.contains("output") && doc.at("output").contains("path"))
        config.output_path = get_field<std::string>(doc.at("output"), "path", "output");
    return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
    return parse_experiment_config(read_json_file(file), file.parent_path());
}

json to_json(const ExperimentConfig& config) {
    json inst;
    std::visit(
        [&](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SyntheticSource>) {
                inst["source"] = "synthetic";
                inst["n"] = src.n;
                inst["k"] = src.population.size();
                const std::vector<double> weights(src.population.weights().begin(), src.population.weights().end());
                if (src.population_label == "explicit") inst["population"] = weights;
                else inst["population"] = src.population_label;
                inst["weights"] = weights;
            } else if constexpr (std::is_same_v<T, HardFamilySource>) {
                inst["source"] = "hard-family";
                inst["n"] = src.n;
                inst["p"] = std::vector<double>(src.population.weights().begin(), src.population.weights().end());
                if (src.deltas) inst["deltas"] = *src.deltas;
                if (src.delta_scale) inst["delta_scale"] = *src.delta_scale;
                std::vector<std::size_t> alternatives;
                for (auto b : src.alternatives) alternatives.push_back(b + 1);
                inst["alternatives"] = alternatives;
                inst["omega"] = src.omega;
            } else {
                inst["source"] = src.kind;
                inst["path"] = src.path;
                if (src.scale.min) inst["reward_min"] = *src.scale.min;
                if (src.scale.max) inst["reward_max"] = *src.scale.max;
                inst["n"] = src.instance->n();
                inst["k"] = src.instance->k();
            }
        },
        config.source);

    json pol;
    pol["name"] = std::string(to_string(config.policy.kind));
    pol["subroutine"] = std::string(to_string(config.policy.subroutine));
    if (config.policy.alpha) pol["alpha"] = *config.policy.alpha;

    json doc;
    doc["instance"] = std::move(inst);
    doc["policy"] = std::move(pol);
    doc["horizon"] = config.horizon;
    doc["runs"] = config.runs;
    doc["seed"] = config.base_seed;
    if (config.output_path) doc["output"] = {{"path", *config.output_path}};
    return doc;
}

std::shared_ptr<const Instance> instance_for_run(const ExperimentConfig& config, std::uint64_t seed) {
    return std::visit(
        [&](const auto& src) -> std::shared_ptr<const Instance> {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SyntheticSource>) {
                Rng rng(seed, Stream::Instance);
                return std::make_shared<const Instance>(make_synthetic_worstcase(src.n, src.population, config.horizon, rng));
            } else if constexpr (std::is_same_v<T, HardFamilySource>) {
                const auto deltas = hard_family_deltas(src, config.horizon);
                return std::make_shared<const Instance>(
                    make_hard_family_member(src.n, src.population, deltas, src.alternatives, src.omega));
            } else {
                return src.instance;
            }
        },
        config.source);
}

PolicyConfig resolve_policy(const PolicySpec& spec, const Instance& instance) {
    PolicyConfig config;
    config.kind = spec.kind;
    config.subroutine_kind = spec.subroutine;
    config.budget_alpha = spec.alpha;
    if (spec.kind == PolicyKind::KnownPActive || spec.kind == PolicyKind::BudgetedActive)
        config.known_p = instance.population();
    return config;
}

} // namespace ctxband
