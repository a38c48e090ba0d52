// ctxband: allocation calculator and Monte-Carlo simulator for bandits with
// finite subpopulations.
//
//   ctxband alloc --p 0.8,0.2 [--alpha 0.05]
//   ctxband run --config exp.json [--policy eetc] [--horizon T] [--runs R] [--seed S] [--out report.json]
//   ctxband sweep-budget --config exp.json --alphas 0:0.1:1 [--out prefix]
//   ctxband sweep-horizon --config exp.json --horizons 1000,2000,4000 [--out prefix]
//   ctxband replay --data ratings.csv --policy eetc --horizon T --runs R
//   ctxband gen --kind synthetic|hard-family|skewed-p ...
//
// Exit codes: 0 success, 2 config/input error, 3 runtime error.

#include "ctxband/allocation.hpp"
#include "ctxband/config.hpp"
#include "ctxband/environments.hpp"
#include "ctxband/error.hpp"
#include "ctxband/harness.hpp"
#include "ctxband/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace ctxband;
using nlohmann::json;

namespace {

std::vector<double> parse_list(const std::string& text) {
    // "a:step:b" expands to an inclusive grid; anything else is a comma list.
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        std::string a, step, b;
        std::getline(ss, a, ':');
        std::getline(ss, step, ':');
        std::getline(ss, b, ':');
        try {
            const double lo = std::stod(a), dx = std::stod(step), hi = std::stod(b);
            if (!(dx > 0) || hi < lo) throw InputError("bad range '" + text + "'");
            const auto count = static_cast<long>(std::floor((hi - lo) / dx + 1e-9));
            for (long i = 0; i <= count; ++i) out.push_back(std::min(hi, lo + static_cast<double>(i) * dx));
            return out;
        } catch (const std::logic_error&) {
            throw InputError("bad range '" + text + "'");
        }
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw InputError("not a number: '" + item + "'");
        }
    }
    if (out.empty()) throw InputError("empty list");
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
    out << content;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::filesystem::path with_extension(const std::string& path, const char* ext) {
    std::filesystem::path p(path);
    p.replace_extension(ext);
    return p;
}

void emit_report(const RegretReport& report, const std::optional<std::string>& out_path) {
    const std::string text = dump(report_to_json(report));
    if (!out_path) {
        std::cout << text;
        return;
    }
    write_file(*out_path, text);
    std::ostringstream csv;
    write_per_run_csv(csv, report);
    write_file(with_extension(*out_path, ".csv"), csv.str());
}

struct RunOverrides {
    std::string policy;
    std::string subroutine;
    std::optional<double> alpha;
    std::optional<std::int64_t> horizon;
    std::optional<std::int64_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void apply(ExperimentConfig& config, const RunOverrides& o) {
    if (!o.policy.empty()) config.policy.kind = parse_policy_kind(o.policy);
    if (!o.subroutine.empty()) config.policy.subroutine = parse_subroutine_kind(o.subroutine);
    if (o.alpha) config.policy.alpha = *o.alpha;
    if (o.horizon) config.horizon = *o.horizon;
    if (o.runs) config.runs = *o.runs;
    if (o.seed) config.base_seed = *o.seed;
    if (o.out) config.output_path = *o.out;
}

void add_run_overrides(CLI::App* cmd, RunOverrides& o) {
    cmd->add_option("--policy", o.policy, "passive | active-known-p | budgeted | uniform-active | eetc");
    cmd->add_option("--subroutine", o.subroutine, "uniform | ucb");
    cmd->add_option("--alpha", o.alpha, "intervention budget for the budgeted policy");
    cmd->add_option("--horizon", o.horizon, "number of rounds T");
    cmd->add_option("--runs", o.runs, "Monte-Carlo runs R");
    cmd->add_option("--seed", o.seed, "base seed; run r uses seed + r");
    cmd->add_option("--out", o.out, "output path");
}

// -------------------------------------------------------------------------

int cmd_alloc(const std::string& p_text, std::optional<double> alpha, bool normalize) {
    auto weights = parse_list(p_text);
    const PopulationDistribution p =
        normalize ? PopulationDistribution::normalized(std::move(weights)) : PopulationDistribution(std::move(weights));
    const Allocation q = optimal_active_allocation(p);
    json doc;
    doc["p"] = std::vector<double>(p.weights().begin(), p.weights().end());
    doc["optimal_allocation"] = std::vector<double>(q.proportions().begin(), q.proportions().end());
    doc["s_value"] = s_value(p, q);
    doc["norm_two_thirds"] = lp_quasi_norm(p.weights(), 2.0 / 3.0);
    doc["passive_value"] = std::sqrt(lp_quasi_norm(p.weights(), 0.5));
    doc["active_passive_gap"] = active_passive_gap(p);
    doc["alpha_min"] = alpha_min(p);
    if (alpha) doc["budget_solution"] = budget_solution_to_json(budgeted_allocation(p, *alpha));
    std::cout << dump(doc);
    return 0;
}

int cmd_run(const std::string& config_path, const RunOverrides& o) {
    ExperimentConfig config = load_experiment_config(config_path);
    apply(config, o);
    emit_report(run_experiment(config), config.output_path);
    return 0;
}

void emit_sweep(const std::vector<SweepPoint>& points, const std::string& prefix, const std::string& x_name,
                const std::string& title) {
    std::ostringstream csv;
    write_sweep_csv(csv, points, x_name);
    std::cout << csv.str();
    write_file(prefix + ".csv", csv.str());
    std::ostringstream svg;
    write_svg_line_chart(svg, sweep_chart(points, title, x_name));
    write_file(prefix + ".svg", svg.str());
    json all = json::array();
    for (const auto& pt : points) all.push_back({{x_name, pt.x}, {"report", report_to_json(pt.report)}});
    write_file(prefix + ".json", dump(all));
}

int cmd_sweep_budget(const std::string& config_path, const std::string& alphas_text, RunOverrides o,
                     const std::string& prefix) {
    ExperimentConfig config = load_experiment_config(config_path);
    o.out.reset();
    apply(config, o);
    config.policy.kind = PolicyKind::BudgetedActive;
    const auto alphas = parse_list(alphas_text);
    if (!config.policy.alpha) config.policy.alpha = alphas.front();
    emit_sweep(sweep_budget(config, alphas), prefix, "alpha", "Simple regret vs intervention budget");
    return 0;
}

int cmd_sweep_horizon(const std::string& config_path, const std::string& horizons_text, RunOverrides o,
                      const std::string& prefix) {
    ExperimentConfig config = load_experiment_config(config_path);
    o.out.reset();
    apply(config, o);
    std::vector<std::int64_t> horizons;
    for (double h : parse_list(horizons_text)) {
        if (h < 1 || h != std::floor(h)) throw InputError("horizons must be positive integers");
        horizons.push_back(static_cast<std::int64_t>(h));
    }
    emit_sweep(sweep_horizon(config, horizons), prefix, "horizon", "Simple regret vs horizon");
    return 0;
}

int cmd_replay(const std::string& data, const RunOverrides& o, std::optional<double> rmin, std::optional<double> rmax) {
    json inst = {{"source", "replay"}, {"path", data}};
    if (rmin) inst["reward_min"] = *rmin;
    if (rmax) inst["reward_max"] = *rmax;
    json doc = {{"instance", inst}, {"policy", {{"name", o.policy}}}, {"horizon", 1}};
    ExperimentConfig config = parse_experiment_config(doc);
    apply(config, o);
    emit_report(run_experiment(config), config.output_path);
    return 0;
}

struct GenArgs {
    std::string kind;
    std::int64_t n = 0;
    std::int64_t k = 0;
    std::string population = "skewed";
    std::string p;
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
    std::string deltas;
    std::string alternatives;
    std::string omega;
    std::optional<std::string> out;
};

int cmd_gen(const GenArgs& a) {
    json doc;
    if (a.kind == "skewed-p") {
        if (a.k < 1) throw InputError("gen skewed-p needs --k");
        const auto p = make_skewed_p(static_cast<std::size_t>(a.k));
        doc = {{"k", p.size()}, {"p", std::vector<double>(p.weights().begin(), p.weights().end())}};
    } else if (a.kind == "synthetic") {
        if (a.n < 2 || a.horizon < 1) throw InputError("gen synthetic needs --n >= 2 and --horizon >= 1");
        std::string label;
        json pop = a.p.empty() ? json(a.population) : json(parse_list(a.p));
        if (a.p.empty() && a.k < 1) throw InputError("gen synthetic needs --k with a named population");
        const auto p = parse_population(pop, static_cast<std::size_t>(std::max<std::int64_t>(a.k, 0)), label);
        Rng rng(a.seed, Stream::Instance);
        doc = instance_to_json(make_synthetic_worstcase(static_cast<std::size_t>(a.n), p, a.horizon, rng));
    } else if (a.kind == "hard-family") {
        if (a.n < 2 || a.p.empty()) throw InputError("gen hard-family needs --n >= 2 and --p");
        const PopulationDistribution p(parse_list(a.p));
        const auto deltas = parse_list(a.deltas);
        std::vector<std::size_t> alternatives;
        for (double b : parse_list(a.alternatives)) {
            if (b < 2 || b != std::floor(b)) throw InputError("--b entries are 1-based arm indices >= 2");
            alternatives.push_back(static_cast<std::size_t>(b) - 1);
        }
        std::vector<int> omega;
        for (double w : parse_list(a.omega)) omega.push_back(static_cast<int>(w));
        doc = instance_to_json(make_hard_family_member(static_cast<std::size_t>(a.n), p, deltas, alternatives, omega));
    } else {
        throw InputError("--kind must be synthetic, hard-family or skewed-p");
    }
    if (a.out) write_file(*a.out, dump(doc));
    else std::cout << dump(doc);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Allocation calculator and Monte-Carlo simulator for bandits with subpopulations"};
    app.require_subcommand(1);
    std::optional<int> threads;
    app.add_option("--threads", threads, "OpenMP worker threads (results do not depend on this)");

    std::string p_text;
    std::optional<double> alloc_alpha;
    bool normalize = false;
    auto* alloc = app.add_subcommand("alloc", "allocation quantities for a population distribution");
    alloc->add_option("--p", p_text, "comma-separated weights")->required();
    alloc->add_option("--alpha", alloc_alpha, "also solve the budgeted program at this budget");
    alloc->add_flag("--normalize", normalize, "divide the weights by their sum first");

    std::string config_path;
    RunOverrides run_opts;
    auto* run = app.add_subcommand("run", "Monte-Carlo experiment from a JSON config");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    add_run_overrides(run, run_opts);

    std::string alphas_text;
    std::string sweep_prefix = "budget_sweep";
    RunOverrides sweep_opts;
    auto* sweep = app.add_subcommand("sweep-budget", "budgeted policy across intervention budgets");
    sweep->add_option("--config", config_path, "experiment config (JSON)")->required();
    sweep->add_option("--alphas", alphas_text, "comma list or start:step:end")->required();
    add_run_overrides(sweep, sweep_opts);
    sweep->remove_option(sweep->get_option("--out"));
    sweep->add_option("--out", sweep_prefix, "output prefix for .csv/.svg/.json");

    std::string horizons_text;
    std::string horizon_prefix = "horizon_sweep";
    RunOverrides horizon_opts;
    auto* hsweep = app.add_subcommand("sweep-horizon", "one configuration across horizons");
    hsweep->add_option("--config", config_path, "experiment config (JSON)")->required();
    hsweep->add_option("--horizons", horizons_text, "comma list of horizons")->required();
    add_run_overrides(hsweep, horizon_opts);
    hsweep->remove_option(hsweep->get_option("--out"));
    hsweep->add_option("--out", horizon_prefix, "output prefix for .csv/.svg/.json");

    std::string data_path;
    RunOverrides replay_opts;
    std::optional<double> reward_min, reward_max;
    auto* replay = app.add_subcommand("replay", "experiment on a replay CSV");
    replay->add_option("--data", data_path, "treatment,subpopulation,reward CSV")->required();
    add_run_overrides(replay, replay_opts);
    replay->get_option("--policy")->required();
    replay->get_option("--horizon")->required();
    replay->get_option("--runs")->required();
    replay->add_option("--reward-min", reward_min, "rescale rewards from [min, max] to [0, 1]");
    replay->add_option("--reward-max", reward_max, "rescale rewards from [min, max] to [0, 1]");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "emit an instance or population as JSON");
    gen->add_option("--kind", gen_args.kind, "synthetic | hard-family | skewed-p")->required();
    gen->add_option("--n", gen_args.n, "treatments");
    gen->add_option("--k", gen_args.k, "subpopulations");
    gen->add_option("--population", gen_args.population, "skewed | uniform (synthetic)");
    gen->add_option("--p", gen_args.p, "explicit comma-separated weights");
    gen->add_option("--horizon", gen_args.horizon, "horizon used for the synthetic gaps");
    gen->add_option("--seed", gen_args.seed, "seed for the optimal-arm draw");
    gen->add_option("--deltas", gen_args.deltas, "hard-family gaps, one per subpopulation");
    gen->add_option("--b", gen_args.alternatives, "hard-family alternative arms (1-based)");
    gen->add_option("--omega", gen_args.omega, "hard-family bits");
    gen->add_option("--out", gen_args.out, "write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (threads) {
            if (*threads < 1) throw InputError("--threads must be >= 1");
            omp_set_num_threads(*threads);
        }
        if (*alloc) return cmd_alloc(p_text, alloc_alpha, normalize);
        if (*run) return cmd_run(config_path, run_opts);
        if (*sweep) return cmd_sweep_budget(config_path, alphas_text, sweep_opts, sweep_prefix);
        if (*hsweep) return cmd_sweep_horizon(config_path, horizons_text, horizon_opts, horizon_prefix);
        if (*replay) return cmd_replay(data_path, replay_opts, reward_min, reward_max);
        if (*gen) return cmd_gen(gen_args);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
