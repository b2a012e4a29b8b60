#include "lrrl/runner/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace lrrl::runner {

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Landscape: return "landscape";
        case ExperimentKind::RL: return "rl";
        case ExperimentKind::SyntheticBandit: return "synthetic_bandit";
    }
    return "unknown";
}

namespace {

int line_of(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.line >= 0 ? mark.line + 1 : 0;
}

void require_map(const YAML::Node& node, const std::string& section) {
    if (!node.IsMap()) throw ConfigError("section '" + section + "' must be a mapping", line_of(node));
}

void check_keys(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> allowed) {
    require_map(node, section);
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!keys.count(key))
            throw ConfigError("unknown key '" + key + "' in " + (section.empty() ? "top level" : "'" + section + "'"),
                              line_of(kv.first));
    }
}

template <typename T>
T as(const YAML::Node& node, const std::string& what) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("invalid value for '" + what + "'", line_of(node));
    }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, T& out, const std::string& section) {
    if (const auto node = parent[key]) out = as<T>(node, section.empty() ? key : section + "." + key);
}

// Runs a validation callback and rethrows its invalid_argument as a
// ConfigError at the given node.
template <typename F>
void at_node(const YAML::Node& node, F&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), line_of(node));
    }
}

ArmSpec parse_arm(const YAML::Node& node) {
    if (node.IsScalar()) {
        const double rate = as<double>(node, "arms[]");
        ArmSpec arm;
        at_node(node, [&] { arm = ArmSpec::fixed(rate); });
        return arm;
    }
    check_keys(node, "arms[]", {"rate", "eta0", "decay"});
    ArmSpec arm;
    if (node["rate"]) {
        if (node["eta0"] || node["decay"])
            throw ConfigError("an arm has either 'rate' or 'eta0'/'decay', not both", line_of(node));
        const double rate = as<double>(node["rate"], "arms[].rate");
        at_node(node, [&] { arm = ArmSpec::fixed(rate); });
    } else {
        if (!node["eta0"]) throw ConfigError("scheduler arm needs 'eta0'", line_of(node));
        const double eta0 = as<double>(node["eta0"], "arms[].eta0");
        const double decay = node["decay"] ? as<double>(node["decay"], "arms[].decay") : 0.0;
        at_node(node, [&] { arm = ArmSpec::exp_decay(eta0, decay); });
    }
    return arm;
}

ArmSet parse_arms(const YAML::Node& node) {
    if (node.IsScalar()) {
        ArmSet arms;
        at_node(node, [&] { arms = arm_sets::by_name(node.as<std::string>()); });
        return arms;
    }
    if (!node.IsSequence()) throw ConfigError("'arms' must be a preset name or a list", line_of(node));
    ArmSet arms;
    for (const auto& item : node) arms.push_back(parse_arm(item));
    if (arms.empty()) throw ConfigError("arm set must not be empty", line_of(node));
    return arms;
}

void parse_bandit(const YAML::Node& node, bandit::BanditConfig& out, const std::string& section) {
    check_keys(node, section,
               {"kind", "alpha", "delta", "window", "exclude_current_feedback", "weight_bound", "rho", "fixed_arm"});
    if (const auto k = node["kind"]) at_node(k, [&] { out.kind = bandit::bandit_kind_from_string(k.as<std::string>()); });
    if (out.kind == bandit::BanditKind::Exp3)
        for (const char* key : {"delta", "window"})
            if (!node[key])
                throw ConfigError(section + ": Exp3 requires an explicit '" + key + "'", line_of(node));
    read(node, "alpha", out.exp3.alpha, section);
    read(node, "delta", out.exp3.delta, section);
    read(node, "window", out.exp3.window, section);
    read(node, "exclude_current_feedback", out.exp3.exclude_current_feedback, section);
    read(node, "weight_bound", out.exp3.weight_bound, section);
    read(node, "rho", out.rho, section);
    read(node, "fixed_arm", out.fixed_arm, section);
    if (!(out.exp3.alpha > 0.0)) throw ConfigError("bandit alpha must be positive", line_of(node));
    if (!(out.exp3.delta > 0.0 && out.exp3.delta <= 1.0))
        throw ConfigError("bandit delta must lie in (0, 1]", line_of(node));
    if (out.exp3.window < 1) throw ConfigError("bandit window must be >= 1", line_of(node));
    if (!(out.rho >= 0.0)) throw ConfigError("bandit rho must be nonnegative", line_of(node));
    if (!(out.exp3.weight_bound > 0.0)) throw ConfigError("bandit weight_bound must be positive", line_of(node));
}

void parse_optimizer(const YAML::Node& node, optim::OptimizerConfig& out) {
    check_keys(node, "optimizer", {"kind", "beta1", "beta2", "eps", "decay", "momentum", "centered", "rms_eps"});
    if (const auto k = node["kind"])
        at_node(k, [&] { out.kind = optim::optimizer_kind_from_string(k.as<std::string>()); });
    read(node, "beta1", out.beta1, "optimizer");
    read(node, "beta2", out.beta2, "optimizer");
    read(node, "eps", out.adam_eps, "optimizer");
    read(node, "decay", out.rms_decay, "optimizer");
    read(node, "momentum", out.momentum, "optimizer");
    read(node, "centered", out.centered, "optimizer");
    read(node, "rms_eps", out.rms_eps, "optimizer");
    at_node(node, [&] { out.validate(); });
}

void parse_rl(const YAML::Node& node, RLSection& out) {
    check_keys(node, "rl",
               {"env", "gamma", "episodes", "horizon", "lambda", "tau", "kappa", "batch_size", "replay_capacity",
                "replay_start", "epsilon", "reward_clip", "hidden", "episodes_per_iteration"});
    auto& t = out.train;
    if (const auto env = node["env"]) {
        check_keys(env, "rl.env", {"kind", "size", "slip_prob", "length"});
        read(env, "kind", out.env.kind, "rl.env");
        read(env, "size", out.env.size, "rl.env");
        read(env, "slip_prob", out.env.slip_prob, "rl.env");
        read(env, "length", out.env.chain_length, "rl.env");
        if (out.env.kind != "gridworld" && out.env.kind != "chain")
            throw ConfigError("rl.env.kind must be 'gridworld' or 'chain'", line_of(env));
        if (!(out.env.slip_prob >= 0.0 && out.env.slip_prob <= 1.0))
            throw ConfigError("rl.env.slip_prob must lie in [0, 1]", line_of(env));
    }
    read(node, "gamma", t.gamma, "rl");
    if (!(t.gamma >= 0.0 && t.gamma <= 1.0)) throw ConfigError("rl.gamma must lie in [0, 1]", line_of(node["gamma"]));
    read(node, "episodes", t.episodes, "rl");
    read(node, "horizon", t.horizon, "rl");
    read(node, "lambda", t.lambda, "rl");
    read(node, "tau", t.tau, "rl");
    read(node, "batch_size", t.batch_size, "rl");
    read(node, "replay_capacity", t.replay_capacity, "rl");
    read(node, "replay_start", t.replay_start, "rl");
    read(node, "episodes_per_iteration", out.episodes_per_iteration, "rl");
    if (const auto k = node["kappa"]) {
        if (k.IsScalar()) {
            t.kappa = {as<std::uint64_t>(k, "rl.kappa"), rl::KappaUnit::Episodes};
        } else {
            check_keys(k, "rl.kappa", {"value", "unit"});
            read(k, "value", t.kappa.value, "rl.kappa");
            if (const auto u = k["unit"]) {
                const auto unit = as<std::string>(u, "rl.kappa.unit");
                if (unit == "steps")
                    t.kappa.unit = rl::KappaUnit::Steps;
                else if (unit == "episodes")
                    t.kappa.unit = rl::KappaUnit::Episodes;
                else
                    throw ConfigError("rl.kappa.unit must be 'steps' or 'episodes'", line_of(u));
            }
        }
    }
    if (const auto e = node["epsilon"]) {
        check_keys(e, "rl.epsilon", {"initial", "final", "decay_steps"});
        read(e, "initial", t.epsilon.initial, "rl.epsilon");
        read(e, "final", t.epsilon.final, "rl.epsilon");
        read(e, "decay_steps", t.epsilon.decay_steps, "rl.epsilon");
    }
    if (const auto c = node["reward_clip"]) {
        if (c.IsNull() || (c.IsScalar() && c.as<std::string>() == "none")) {
            t.reward_clip.reset();
        } else {
            const auto v = as<std::vector<double>>(c, "rl.reward_clip");
            if (v.size() != 2) throw ConfigError("rl.reward_clip must be [lo, hi] or none", line_of(c));
            t.reward_clip = std::make_pair(v[0], v[1]);
        }
    }
    read(node, "hidden", t.hidden, "rl");
    if (out.episodes_per_iteration < 1) throw ConfigError("rl.episodes_per_iteration must be >= 1", line_of(node));
    at_node(node, [&] {
        auto probe = t;
        probe.arms = {ArmSpec::fixed(1.0)};
        probe.validate();
    });
}

void parse_landscape(const YAML::Node& node, LandscapeSection& out) {
    check_keys(node, "landscape", {"functions", "steps", "xi", "starts"});
    if (const auto f = node["functions"]) {
        if (f.IsScalar() && f.as<std::string>() == "all") {
            out.functions.clear();
        } else {
            out.functions = as<std::vector<std::string>>(f, "landscape.functions");
            for (const auto& name : out.functions) at_node(f, [&] { landscapes::by_name(name); });
        }
    }
    read(node, "steps", out.steps, "landscape");
    read(node, "xi", out.feedback.xi, "landscape");
    if (!(out.feedback.xi > 0.0)) throw ConfigError("landscape.xi must be positive", line_of(node));
    if (const auto s = node["starts"]) {
        require_map(s, "landscape.starts");
        for (const auto& kv : s) {
            const auto name = kv.first.as<std::string>();
            at_node(kv.first, [&] { landscapes::by_name(name); });
            const auto v = as<std::vector<double>>(kv.second, "landscape.starts." + name);
            if (v.size() != 2) throw ConfigError("start point must have 2 coordinates", line_of(kv.second));
            out.starts[name] = {v[0], v[1]};
        }
    }
}

void parse_synthetic(const YAML::Node& node, SyntheticSection& out) {
    check_keys(node, "synthetic", {"rounds", "means", "reward", "noise_std", "switch_round"});
    read(node, "rounds", out.rounds, "synthetic");
    read(node, "means", out.means, "synthetic");
    read(node, "noise_std", out.noise_std, "synthetic");
    read(node, "switch_round", out.switch_round, "synthetic");
    if (const auto r = node["reward"]) {
        const auto kind = as<std::string>(r, "synthetic.reward");
        if (kind == "bernoulli")
            out.reward = SyntheticSection::Reward::Bernoulli;
        else if (kind == "gaussian")
            out.reward = SyntheticSection::Reward::Gaussian;
        else if (kind == "deterministic")
            out.reward = SyntheticSection::Reward::Deterministic;
        else
            throw ConfigError("synthetic.reward must be bernoulli, gaussian or deterministic", line_of(r));
    }
    if (out.means.empty()) throw ConfigError("synthetic.means must not be empty", line_of(node));
}

}  // namespace

std::vector<Variant> ExperimentConfig::expanded_variants() const {
    std::vector<Variant> out = variants;
    if (out.empty()) out.push_back({"lrrl", bandit});
    if (fixed_baselines && kind != ExperimentKind::SyntheticBandit) {
        for (std::size_t k = 0; k < arms.size(); ++k) {
            bandit::BanditConfig fixed = bandit;
            fixed.kind = bandit::BanditKind::Fixed;
            fixed.fixed_arm = k;
            out.push_back({"fixed_" + std::to_string(k), fixed});
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ConfigError("at least one seed is required", 0);
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1", 0);
    std::set<std::string> names;
    const std::size_t arm_count = kind == ExperimentKind::SyntheticBandit ? synthetic.means.size() : arms.size();
    for (const auto& v : expanded_variants()) {
        if (v.name.empty() || v.name.find("__") != std::string::npos || v.name.find('/') != std::string::npos)
            throw ConfigError("invalid variant name '" + v.name + "'", 0);
        if (!names.insert(v.name).second) throw ConfigError("duplicate variant name '" + v.name + "'", 0);
        if (v.bandit.kind == bandit::BanditKind::Fixed && v.bandit.fixed_arm >= arm_count)
            throw ConfigError("variant '" + v.name + "' fixes an arm index out of range", 0);
        if (v.bandit.kind == bandit::BanditKind::Exp3 && kind == ExperimentKind::SyntheticBandit && arm_count < 2)
            throw ConfigError("Exp3 needs at least 2 arms", 0);
    }
    switch (kind) {
        case ExperimentKind::RL: {
            if (arms.empty()) throw ConfigError("arm set must not be empty", 0);
            auto probe = rl.train;
            probe.arms = arms;
            probe.optimizer = optimizer;
            try {
                probe.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what(), 0);
            }
            break;
        }
        case ExperimentKind::Landscape:
            if (arms.empty()) throw ConfigError("arm set must not be empty", 0);
            if (landscape.steps < 1) throw ConfigError("landscape.steps must be >= 1", 0);
            break;
        case ExperimentKind::SyntheticBandit:
            if (synthetic.rounds < 1) throw ConfigError("synthetic.rounds must be >= 1", 0);
            break;
    }
}

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    if (!root || !root.IsMap()) throw ConfigError("config must be a mapping", 1);
    check_keys(root, "",
               {"experiment", "name", "seeds", "output_dir", "parallelism", "plot", "arms", "bandit", "variants",
                "fixed_baselines", "optimizer", "metrics", "rl", "landscape", "synthetic"});

    ExperimentConfig cfg;
    cfg.arms = arm_sets::k5();
    const auto kind_node = root["experiment"];
    if (!kind_node) throw ConfigError("missing required key 'experiment'", 1);
    const auto kind = as<std::string>(kind_node, "experiment");
    if (kind == "rl")
        cfg.kind = ExperimentKind::RL;
    else if (kind == "landscape")
        cfg.kind = ExperimentKind::Landscape;
    else if (kind == "synthetic_bandit")
        cfg.kind = ExperimentKind::SyntheticBandit;
    else
        throw ConfigError("experiment must be rl, landscape or synthetic_bandit", line_of(kind_node));

    if (cfg.kind == ExperimentKind::Landscape) {
        cfg.optimizer.kind = optim::OptimizerKind::SGD;
        cfg.bandit.kind = bandit::BanditKind::Moss;
    }

    read(root, "name", cfg.name, "");
    read(root, "output_dir", cfg.output_dir, "");
    read(root, "parallelism", cfg.parallelism, "");
    read(root, "plot", cfg.plot, "");
    read(root, "fixed_baselines", cfg.fixed_baselines, "");
    if (const auto s = root["seeds"]) {
        cfg.seeds = as<std::vector<std::uint64_t>>(s, "seeds");
        if (cfg.seeds.empty()) throw ConfigError("at least one seed is required", line_of(s));
    }
    if (const auto a = root["arms"]) {
        if (cfg.kind == ExperimentKind::Landscape && a.IsScalar() && a.as<std::string>() == "reference")
            cfg.landscape.reference_arms = true;
        else
            cfg.arms = parse_arms(a);
    } else if (cfg.kind == ExperimentKind::Landscape) {
        cfg.landscape.reference_arms = true;
    }
    // Three placeholders so fixed_<k> baselines line up with {r/10, r, 10r}.
    if (cfg.landscape.reference_arms) cfg.arms = landscapes::default_arms(landscapes::all().front());
    if (const auto b = root["bandit"]) parse_bandit(b, cfg.bandit, "bandit");
    if (const auto o = root["optimizer"]) parse_optimizer(o, cfg.optimizer);
    if (const auto m = root["metrics"]) {
        check_keys(m, "metrics", {"final_window", "jumpstart_window"});
        read(m, "final_window", cfg.metrics.final_window, "metrics");
        read(m, "jumpstart_window", cfg.metrics.jumpstart_window, "metrics");
        if (cfg.metrics.final_window < 1 || cfg.metrics.jumpstart_window < 1)
            throw ConfigError("metrics windows must be >= 1", line_of(m));
    }
    if (const auto v = root["variants"]) {
        if (!v.IsSequence()) throw ConfigError("'variants' must be a list", line_of(v));
        for (const auto& item : v) {
            check_keys(item, "variants[]", {"name", "bandit"});
            Variant variant{"", cfg.bandit};
            if (!item["name"]) throw ConfigError("variant needs a 'name'", line_of(item));
            variant.name = as<std::string>(item["name"], "variants[].name");
            if (const auto b = item["bandit"]) parse_bandit(b, variant.bandit, "variants[].bandit");
            cfg.variants.push_back(variant);
        }
    }
    if (const auto r = root["rl"]) parse_rl(r, cfg.rl);
    if (const auto l = root["landscape"]) parse_landscape(l, cfg.landscape);
    if (const auto s = root["synthetic"]) parse_synthetic(s, cfg.synthetic);

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace lrrl::runner
