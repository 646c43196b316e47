#include "fogsim/config.hpp"

#include <fmt/format.h>
#include <fstream>
#include <set>

#include "fogsim/errors.hpp"

namespace fogsim {

namespace {

using nlohmann::json;

// Field access that records type/path problems instead of throwing one at a time.
class Reader {
public:
    Reader(const json& j, std::vector<std::string>& errors) : j_(j), errors_(errors) {}

    bool object_ok(const std::string& path) {
        if (j_.is_object()) return true;
        errors_.push_back(path + ": expected an object");
        return false;
    }

    double num(const std::string& path, const char* key, double fallback) {
        if (!j_.contains(key)) return fallback;
        if (!j_[key].is_number()) {
            errors_.push_back(fmt::format("{}.{}: expected a number", path, key));
            return fallback;
        }
        return j_[key].get<double>();
    }

    int64_t integer(const std::string& path, const char* key, int64_t fallback) {
        if (!j_.contains(key)) return fallback;
        if (!j_[key].is_number_integer()) {
            errors_.push_back(fmt::format("{}.{}: expected an integer", path, key));
            return fallback;
        }
        return j_[key].get<int64_t>();
    }

    uint64_t uinteger(const std::string& path, const char* key, uint64_t fallback) {
        if (!j_.contains(key)) return fallback;
        if (!j_[key].is_number_unsigned() && !j_[key].is_number_integer()) {
            errors_.push_back(fmt::format("{}.{}: expected a non-negative integer", path, key));
            return fallback;
        }
        const int64_t v = j_[key].get<int64_t>();
        if (v < 0) {
            errors_.push_back(fmt::format("{}.{}: expected a non-negative integer", path, key));
            return fallback;
        }
        return static_cast<uint64_t>(v);
    }

    bool boolean(const std::string& path, const char* key, bool fallback) {
        if (!j_.contains(key)) return fallback;
        if (!j_[key].is_boolean()) {
            errors_.push_back(fmt::format("{}.{}: expected a boolean", path, key));
            return fallback;
        }
        return j_[key].get<bool>();
    }

    std::string str(const std::string& path, const char* key, const std::string& fallback,
                    bool required = false) {
        if (!j_.contains(key)) {
            if (required) errors_.push_back(fmt::format("{}.{}: required", path, key));
            return fallback;
        }
        if (!j_[key].is_string()) {
            errors_.push_back(fmt::format("{}.{}: expected a string", path, key));
            return fallback;
        }
        return j_[key].get<std::string>();
    }

private:
    const json& j_;
    std::vector<std::string>& errors_;
};

const std::set<std::string> kPolicyNames = {"random", "round_robin", "greedy",
                                            "local_only", "cloud_only", "dqn"};

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    std::vector<std::string> errors;
    ExperimentConfig cfg;

    if (!j.is_object()) throw ConfigError("config: expected a JSON object");

    Reader root(j, errors);
    cfg.horizon = root.num("config", "horizon", cfg.horizon);
    if (!(cfg.horizon > 0)) errors.push_back("horizon: must be > 0");

    cfg.state_layout_version = static_cast<int>(root.integer("config", "state_layout_version", 1));
    if (cfg.state_layout_version != 1) errors.push_back("state_layout_version: must be 1");

    if (j.contains("seeds")) {
        if (!j["seeds"].is_array()) {
            errors.push_back("seeds: expected an array of integers");
        } else {
            for (size_t i = 0; i < j["seeds"].size(); ++i) {
                const auto& s = j["seeds"][i];
                if (!s.is_number_integer() || s.get<int64_t>() < 0) {
                    errors.push_back(fmt::format("seeds[{}]: expected a non-negative integer", i));
                } else {
                    cfg.seeds.push_back(s.get<uint64_t>());
                }
            }
        }
    }
    if (cfg.seeds.empty()) errors.push_back("seeds: at least one seed required");

    // Topology.
    size_t errors_before_topology = errors.size();
    if (!j.contains("topology") || !j["topology"].is_object()) {
        errors.push_back("topology: required object");
    } else {
        const auto& jt = j["topology"];
        if (jt.contains("nodes") && jt["nodes"].is_array()) {
            for (size_t i = 0; i < jt["nodes"].size(); ++i) {
                const std::string path = fmt::format("topology.nodes[{}]", i);
                Reader rn(jt["nodes"][i], errors);
                if (!rn.object_ok(path)) continue;
                NodeSpec n;
                n.id = rn.str(path, "id", "", true);
                const std::string tier = rn.str(path, "tier", "", true);
                if (!tier.empty()) {
                    try {
                        n.tier = tier_from_string(tier);
                    } catch (const std::exception&) {
                        errors.push_back(path + ".tier: must be iot, fog or cloud");
                    }
                }
                n.capacity = rn.num(path, "capacity", 0.0);
                n.busy_power = rn.num(path, "busy_power", 0.0);
                n.idle_power = rn.num(path, "idle_power", 0.0);
                cfg.topology.nodes.push_back(std::move(n));
            }
        } else {
            errors.push_back("topology.nodes: required array");
        }
        if (jt.contains("links") && jt["links"].is_array()) {
            for (size_t i = 0; i < jt["links"].size(); ++i) {
                const std::string path = fmt::format("topology.links[{}]", i);
                Reader rl(jt["links"][i], errors);
                if (!rl.object_ok(path)) continue;
                LinkSpec l;
                l.from = rl.str(path, "from", "", true);
                l.to = rl.str(path, "to", "", true);
                l.bandwidth = rl.num(path, "bandwidth", 0.0);
                l.propagation = rl.num(path, "propagation", 0.0);
                l.tx_power = rl.num(path, "tx_power", 0.0);
                cfg.topology.links.push_back(std::move(l));
            }
        } else {
            errors.push_back("topology.links: required array");
        }
    }
    const bool topology_parsed = errors.size() == errors_before_topology;

    // Streams.
    std::set<std::string> stream_ids;
    if (!j.contains("streams") || !j["streams"].is_array() || j["streams"].empty()) {
        errors.push_back("streams: required non-empty array");
    } else {
        for (size_t i = 0; i < j["streams"].size(); ++i) {
            const std::string path = fmt::format("streams[{}]", i);
            Reader rs(j["streams"][i], errors);
            if (!rs.object_ok(path)) continue;
            TaskStream s;
            s.id = rs.str(path, "id", "", true);
            if (!s.id.empty() && !stream_ids.insert(s.id).second) {
                errors.push_back(path + ".id: duplicate stream id '" + s.id + "'");
            }
            s.period = rs.num(path, "period", 0.0);
            s.deadline = rs.num(path, "deadline", 0.0);
            s.size = rs.num(path, "size", 0.0);
            s.source = rs.str(path, "source", "", true);
            const std::string arrival = rs.str(path, "arrival", "periodic");
            try {
                s.arrival = arrival_from_string(arrival);
            } catch (const std::exception&) {
                errors.push_back(path + ".arrival: must be periodic or poisson");
            }
            if (!(s.period > 0)) errors.push_back(path + ".period: must be > 0");
            if (!(s.deadline > 0)) errors.push_back(path + ".deadline: must be > 0");
            if (!(s.size > 0)) errors.push_back(path + ".size: must be > 0");
            cfg.streams.push_back(std::move(s));
        }
    }

    // Policies.
    if (!j.contains("policies") || !j["policies"].is_array() || j["policies"].empty()) {
        errors.push_back("policies: required non-empty array");
    } else {
        std::set<std::string> seen;
        for (size_t i = 0; i < j["policies"].size(); ++i) {
            const auto& p = j["policies"][i];
            if (!p.is_string() || !kPolicyNames.count(p.get<std::string>())) {
                errors.push_back(fmt::format(
                    "policies[{}]: must be one of random, round_robin, greedy, local_only, cloud_only, dqn",
                    i));
                continue;
            }
            const std::string name = p.get<std::string>();
            if (!seen.insert(name).second) {
                errors.push_back(fmt::format("policies[{}]: duplicate policy '{}'", i, name));
                continue;
            }
            cfg.policies.push_back(name);
        }
    }

    // Training (defaults apply when the section is absent).
    cfg.training.horizon = cfg.horizon;
    if (j.contains("training")) {
        const std::string path = "training";
        Reader rt(j["training"], errors);
        if (rt.object_ok(path)) {
            cfg.training.gamma = rt.num(path, "gamma", cfg.training.gamma);
            cfg.training.learning_rate = rt.num(path, "learning_rate", cfg.training.learning_rate);
            cfg.training.batch_size = static_cast<int>(rt.integer(path, "batch_size", cfg.training.batch_size));
            cfg.training.target_sync_period =
                static_cast<int>(rt.integer(path, "target_sync", cfg.training.target_sync_period));
            cfg.training.epsilon_start = rt.num(path, "epsilon_start", cfg.training.epsilon_start);
            cfg.training.epsilon_end = rt.num(path, "epsilon_end", cfg.training.epsilon_end);
            cfg.training.epsilon_decay_steps =
                rt.uinteger(path, "epsilon_decay_steps", cfg.training.epsilon_decay_steps);
            cfg.training.episodes = static_cast<int>(rt.integer(path, "episodes", cfg.training.episodes));
            cfg.training.horizon = rt.num(path, "horizon", cfg.training.horizon);
            cfg.training.seed = rt.uinteger(path, "seed", cfg.training.seed);
            cfg.training.double_dqn = rt.boolean(path, "double_dqn", cfg.training.double_dqn);
            cfg.training.replay_capacity =
                static_cast<size_t>(rt.uinteger(path, "replay_capacity", cfg.training.replay_capacity));
            if (j["training"].contains("hidden_layers")) {
                const auto& hl = j["training"]["hidden_layers"];
                if (!hl.is_array()) {
                    errors.push_back("training.hidden_layers: expected an array of integers");
                } else {
                    cfg.training.hidden_layers.clear();
                    for (size_t i = 0; i < hl.size(); ++i) {
                        if (!hl[i].is_number_integer() || hl[i].get<int64_t>() < 1) {
                            errors.push_back(fmt::format("training.hidden_layers[{}]: must be >= 1", i));
                        } else {
                            cfg.training.hidden_layers.push_back(hl[i].get<int>());
                        }
                    }
                }
            }
        }
    }
    try {
        cfg.training.validate();
    } catch (const std::exception& e) {
        errors.push_back(e.what());
    }

    // Ledger.
    if (j.contains("ledger")) {
        const std::string path = "ledger";
        Reader rl(j["ledger"], errors);
        if (rl.object_ok(path)) {
            cfg.ledger.enabled = rl.boolean(path, "enabled", cfg.ledger.enabled);
            cfg.ledger.difficulty = static_cast<int>(rl.integer(path, "difficulty", cfg.ledger.difficulty));
            const std::string sel = rl.str(path, "selection", to_string(cfg.ledger.selection));
            try {
                cfg.ledger.selection = selection_from_string(sel);
            } catch (const std::exception&) {
                errors.push_back("ledger.selection: must be fifo or edf");
            }
            cfg.ledger.max_tx_per_block =
                static_cast<int>(rl.integer(path, "max_tx_per_block", cfg.ledger.max_tx_per_block));
            cfg.ledger.hash_rate = rl.num(path, "hash_rate", cfg.ledger.hash_rate);
            cfg.ledger.c_gen_block = rl.num(path, "c_gen_block", cfg.ledger.c_gen_block);
            cfg.ledger.c_val_block = rl.num(path, "c_val_block", cfg.ledger.c_val_block);
            cfg.ledger.alpha = rl.num(path, "alpha", cfg.ledger.alpha);
            cfg.ledger.beta = rl.num(path, "beta", cfg.ledger.beta);
        }
    }
    if (cfg.ledger.difficulty < 0 || cfg.ledger.difficulty > 256) {
        errors.push_back("ledger.difficulty: must be in [0, 256]");
    }
    if (cfg.ledger.max_tx_per_block < 1) errors.push_back("ledger.max_tx_per_block: must be >= 1");
    if (!(cfg.ledger.hash_rate > 0)) errors.push_back("ledger.hash_rate: must be > 0");
    if (!(cfg.ledger.c_gen_block > 0)) errors.push_back("ledger.c_gen_block: must be > 0");
    if (!(cfg.ledger.c_val_block > 0)) errors.push_back("ledger.c_val_block: must be > 0");
    if (!(cfg.ledger.alpha > 0)) errors.push_back("ledger.alpha: must be > 0");
    if (!(cfg.ledger.beta > 0)) errors.push_back("ledger.beta: must be > 0");

    // Attack.
    if (j.contains("attack")) {
        const std::string path = "attack";
        Reader ra(j["attack"], errors);
        if (ra.object_ok(path)) {
            cfg.attack.compromised_fraction =
                ra.num(path, "compromised_fraction", cfg.attack.compromised_fraction);
            cfg.attack.tamper_probability =
                ra.num(path, "tamper_probability", cfg.attack.tamper_probability);
            cfg.attack.seed = ra.uinteger(path, "seed", cfg.attack.seed);
        }
    }
    try {
        cfg.attack.validate();
    } catch (const std::exception& e) {
        errors.push_back(e.what());
    }

    // Reward weights.
    if (j.contains("reward")) {
        const std::string path = "reward";
        Reader rr(j["reward"], errors);
        if (rr.object_ok(path)) {
            cfg.reward.done = rr.num(path, "w_done", cfg.reward.done);
            cfg.reward.latency = rr.num(path, "w_latency", cfg.reward.latency);
            cfg.reward.energy = rr.num(path, "w_energy", cfg.reward.energy);
            cfg.reward.security = rr.num(path, "w_security", cfg.reward.security);
            cfg.reward.miss = rr.num(path, "w_miss", cfg.reward.miss);
        }
    }
    try {
        cfg.reward.validate();
    } catch (const std::exception& e) {
        errors.push_back(std::string("reward: ") + e.what());
    }

    // Structural validation runs whenever the topology section itself parsed,
    // so unrelated field errors do not hide topology violations.
    if (topology_parsed) {
        try {
            const Topology topo = Topology::build(cfg.topology);
            for (size_t i = 0; i < cfg.streams.size(); ++i) {
                const auto& s = cfg.streams[i];
                if (!topo.has_node(s.source) || topo.node(s.source).tier != Tier::Iot) {
                    errors.push_back(
                        fmt::format("streams[{}].source: '{}' is not an iot device", i, s.source));
                }
            }
        } catch (const ConfigError& e) {
            errors.insert(errors.end(), e.violations().begin(), e.violations().end());
        }
    }

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["horizon"] = cfg.horizon;
    j["state_layout_version"] = cfg.state_layout_version;
    j["seeds"] = cfg.seeds;

    json nodes = json::array();
    for (const auto& n : cfg.topology.nodes) {
        nodes.push_back({{"id", n.id},
                         {"tier", to_string(n.tier)},
                         {"capacity", n.capacity},
                         {"busy_power", n.busy_power},
                         {"idle_power", n.idle_power}});
    }
    json links = json::array();
    for (const auto& l : cfg.topology.links) {
        links.push_back({{"from", l.from},
                         {"to", l.to},
                         {"bandwidth", l.bandwidth},
                         {"propagation", l.propagation},
                         {"tx_power", l.tx_power}});
    }
    j["topology"] = {{"nodes", nodes}, {"links", links}};

    json streams = json::array();
    for (const auto& s : cfg.streams) {
        streams.push_back({{"id", s.id},
                           {"period", s.period},
                           {"deadline", s.deadline},
                           {"size", s.size},
                           {"source", s.source},
                           {"arrival", to_string(s.arrival)}});
    }
    j["streams"] = streams;
    j["policies"] = cfg.policies;

    j["training"] = {{"gamma", cfg.training.gamma},
                     {"learning_rate", cfg.training.learning_rate},
                     {"batch_size", cfg.training.batch_size},
                     {"target_sync", cfg.training.target_sync_period},
                     {"epsilon_start", cfg.training.epsilon_start},
                     {"epsilon_end", cfg.training.epsilon_end},
                     {"epsilon_decay_steps", cfg.training.epsilon_decay_steps},
                     {"episodes", cfg.training.episodes},
                     {"horizon", cfg.training.horizon},
                     {"seed", cfg.training.seed},
                     {"double_dqn", cfg.training.double_dqn},
                     {"hidden_layers", cfg.training.hidden_layers},
                     {"replay_capacity", cfg.training.replay_capacity}};

    j["ledger"] = {{"enabled", cfg.ledger.enabled},
                   {"difficulty", cfg.ledger.difficulty},
                   {"selection", to_string(cfg.ledger.selection)},
                   {"max_tx_per_block", cfg.ledger.max_tx_per_block},
                   {"hash_rate", cfg.ledger.hash_rate},
                   {"c_gen_block", cfg.ledger.c_gen_block},
                   {"c_val_block", cfg.ledger.c_val_block},
                   {"alpha", cfg.ledger.alpha},
                   {"beta", cfg.ledger.beta}};

    j["attack"] = {{"compromised_fraction", cfg.attack.compromised_fraction},
                   {"tamper_probability", cfg.attack.tamper_probability},
                   {"seed", cfg.attack.seed}};

    j["reward"] = {{"w_done", cfg.reward.done},
                   {"w_latency", cfg.reward.latency},
                   {"w_energy", cfg.reward.energy},
                   {"w_security", cfg.reward.security},
                   {"w_miss", cfg.reward.miss}};
    return j;
}

Digest config_digest(const ExperimentConfig& cfg) {
    return sha256(config_to_json(cfg).dump());
}

}  // namespace fogsim
