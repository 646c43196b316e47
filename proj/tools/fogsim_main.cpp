#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fogsim/chain_io.hpp"
#include "fogsim/config.hpp"
#include "fogsim/errors.hpp"
#include "fogsim/experiment.hpp"
#include "fogsim/schedulability.hpp"

namespace fs = std::filesystem;
using namespace fogsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

struct GlobalFlags {
    std::string out_dir;
    int64_t seed = -1;
    bool quiet = false;
};

ExperimentConfig load_with_overrides(const std::string& path, const GlobalFlags& g) {
    ExperimentConfig cfg = load_config(path);
    if (g.seed >= 0) cfg.seeds = {static_cast<uint64_t>(g.seed)};
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

nlohmann::json row_to_json(const ResultRow& row) {
    const RunMetrics& m = row.metrics;
    nlohmann::json per_node = nlohmann::json::object();
    for (const auto& [node, count] : m.per_node_incidents) per_node[node] = count;
    return {{"policy", row.policy},
            {"seed", row.seed},
            {"scheduled", m.scheduled},
            {"completed", m.completed},
            {"misses", m.missed},
            {"corrupted", m.corrupted},
            {"sched_ratio", m.sched_ratio},
            {"mean_latency", m.mean_latency},
            {"p95_latency", m.p95_latency},
            {"total_energy", m.total_energy},
            {"incidents", m.incidents},
            {"detected", m.detected},
            {"mean_confirm_latency", m.mean_confirm_latency},
            {"mean_reward", m.mean_reward},
            {"admission_violations", m.admission_violations},
            {"per_node_incidents", per_node},
            {"config_digest", row.config_digest_hex},
            {"wall_clock_s", row.wall_clock_s}};
}

std::string curve_to_csv(const std::vector<EpisodePoint>& curve) {
    std::string out = "episode,mean_reward,sched_ratio\n";
    for (size_t i = 0; i < curve.size(); ++i) {
        out += fmt::format("{},{},{}\n", i, curve[i].mean_reward, curve[i].sched_ratio);
    }
    return out;
}

int cmd_run(const std::string& config_path, const GlobalFlags& g, bool export_chains) {
    const ExperimentConfig cfg = load_with_overrides(config_path, g);

    RunOptions opts;
    opts.keep_chains = export_chains;
    if (!g.quiet) opts.log = &std::cerr;

    ExperimentArtifacts artifacts;
    std::optional<std::ofstream> csv_file;
    std::ostream* sink = &std::cout;
    if (!g.out_dir.empty()) {
        fs::create_directories(g.out_dir);
        csv_file.emplace(fs::path(g.out_dir) / "results.csv", std::ios::trunc);
        if (!*csv_file) throw std::runtime_error("cannot write results.csv");
        sink = &*csv_file;
    }

    const ResultTable table = run_experiment(cfg, opts, &artifacts, sink);

    if (!g.out_dir.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : table.rows) rows.push_back(row_to_json(row));
        nlohmann::json sidecar = {{"config", config_to_json(cfg)},
                                  {"config_digest", to_hex(config_digest(cfg))},
                                  {"rows", rows}};
        write_file(fs::path(g.out_dir) / "results.json", sidecar.dump(2) + "\n");

        if (artifacts.trained) {
            save_checkpoint(fs::path(g.out_dir) / "dqn.ckpt", *artifacts.trained,
                            cfg.training.seed, config_digest(cfg));
            write_file(fs::path(g.out_dir) / "learning_curve.csv", curve_to_csv(artifacts.curve));
        }
        if (export_chains) {
            const fs::path chain_dir = fs::path(g.out_dir) / "chains";
            fs::create_directories(chain_dir);
            for (const auto& [key, chain] : artifacts.chains) {
                std::string name = key;
                std::replace(name.begin(), name.end(), ':', '-');
                std::ofstream cf(chain_dir / (name + ".chain"));
                export_chain(chain, cf);
                std::ofstream hf(chain_dir / (name + ".honest"));
                export_honest_digests(artifacts.honest.at(key), hf);
            }
        }
        if (!g.quiet) std::cerr << "results written to " << g.out_dir << "\n";
    }
    return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& checkpoint_path,
              const GlobalFlags& g) {
    const ExperimentConfig cfg = load_with_overrides(config_path, g);
    const Topology topology = Topology::build(cfg.topology);

    if (!g.quiet) {
        std::cerr << fmt::format("training: {} episodes, horizon {} s, seed {}\n",
                                 cfg.training.episodes, cfg.training.horizon, cfg.training.seed);
    }
    const TrainResult result =
        train(topology, cfg.streams, cfg.training, cfg.ledger, cfg.attack, cfg.reward);
    save_checkpoint(checkpoint_path, result.network, cfg.training.seed, config_digest(cfg));

    if (!g.out_dir.empty()) {
        fs::create_directories(g.out_dir);
        write_file(fs::path(g.out_dir) / "learning_curve.csv", curve_to_csv(result.curve));
    } else if (!g.quiet) {
        std::cout << curve_to_csv(result.curve);
    }
    if (!g.quiet) {
        std::cerr << fmt::format("checkpoint written to {} ({} gradient steps)\n", checkpoint_path,
                                 result.gradient_steps);
    }
    return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& policy,
             const std::string& checkpoint_path, const GlobalFlags& g) {
    ExperimentConfig cfg = load_with_overrides(config_path, g);
    cfg.policies = {policy};

    RunOptions opts;
    if (!g.quiet) opts.log = &std::cerr;
    if (policy == "dqn") {
        if (checkpoint_path.empty()) {
            throw ConfigError("eval: --checkpoint is required for the dqn policy");
        }
        const Checkpoint ckpt = load_checkpoint(checkpoint_path);
        const Topology topology = Topology::build(cfg.topology);
        const size_t want_in = state_length(topology.fog_ids().size());
        if (ckpt.network.sizes.front() != static_cast<int>(want_in) ||
            ckpt.network.sizes.back() != static_cast<int>(topology.action_count())) {
            throw ConfigError(fmt::format(
                "eval: checkpoint shape {}x{} does not match the topology ({} features, {} actions)",
                ckpt.network.sizes.front(), ckpt.network.sizes.back(), want_in,
                topology.action_count()));
        }
        opts.pretrained = ckpt.network;
    }

    std::optional<std::ofstream> csv_file;
    std::ostream* sink = &std::cout;
    if (!g.out_dir.empty()) {
        fs::create_directories(g.out_dir);
        csv_file.emplace(fs::path(g.out_dir) / "results.csv", std::ios::trunc);
        sink = &*csv_file;
    }
    run_experiment(cfg, opts, nullptr, sink);
    return kExitOk;
}

std::vector<StreamDemand> read_demand_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open demand file: " + path);
    std::vector<StreamDemand> demands;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.find_first_not_of("CTD, \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        StreamDemand d;
        char comma;
        if (!(ss >> d.exec_time >> comma >> d.period >> comma >> d.deadline)) {
            throw ConfigError(fmt::format("demand file line {}: expected 'C,T,D'", line_no));
        }
        demands.push_back(d);
    }
    if (demands.empty()) throw ConfigError("demand file holds no streams");
    return demands;
}

int cmd_analyze_dbf(const std::string& demand_path, double delta_max_flag) {
    const auto demands = read_demand_file(demand_path);
    const double delta_max = delta_max_flag > 0 ? delta_max_flag : default_delta_max(demands);

    std::ostream& out = std::cout;
    out << "# demand bound table\ndelta";
    for (size_t i = 0; i < demands.size(); ++i) out << fmt::format(",dbf_{}", i);
    out << ",load\n";

    std::vector<double> points;
    for (const auto& d : demands) {
        for (double p = d.deadline; p <= delta_max; p += d.period) points.push_back(p);
    }
    points.push_back(delta_max);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (double delta : points) {
        out << fmt::format("{}", delta);
        for (const auto& d : demands) out << fmt::format(",{}", dbf(d, delta));
        out << fmt::format(",{}\n", load(demands, delta));
    }

    const auto [max_l, argmax] = max_load(demands, delta_max);
    out << fmt::format("# max load\nmax_load,argmax_delta\n{},{}\n", max_l, argmax);

    out << "# incremental admission\nstream,C,T,D,admitted\n";
    std::vector<StreamDemand> admitted_set;
    for (size_t i = 0; i < demands.size(); ++i) {
        const bool ok = admit(admitted_set, demands[i], delta_max);
        out << fmt::format("{},{},{},{},{}\n", i, demands[i].exec_time, demands[i].period,
                           demands[i].deadline, ok ? "yes" : "no");
        if (ok) admitted_set.push_back(demands[i]);
    }
    return kExitOk;
}

int cmd_audit(const std::string& chain_path, const std::string& honest_path, const GlobalFlags& g) {
    std::ifstream in(chain_path);
    if (!in) throw ConfigError("cannot open chain file: " + chain_path);
    const Chain chain = import_chain(in);

    size_t tx_count = 0;
    for (const auto& b : chain.blocks) tx_count += b.transactions.size();

    const VerifyResult verdict = verify_chain(chain);
    if (!verdict.ok) {
        std::cout << fmt::format("BAD: block {} ({}); {} blocks, {} transactions\n",
                                 verdict.bad_index, to_string(verdict.reason), chain.blocks.size(),
                                 tx_count);
        return kExitRuntimeError;
    }
    std::cout << fmt::format("OK: {} blocks, {} transactions, difficulty {}\n", chain.blocks.size(),
                             tx_count, chain.difficulty);

    if (!honest_path.empty()) {
        std::ifstream hin(honest_path);
        if (!hin) throw ConfigError("cannot open honest-digest file: " + honest_path);
        const HonestOracle oracle = import_honest_digests(hin);
        const SecurityReport report = audit(chain, oracle);
        std::cout << fmt::format("incidents: {}\ndetected: {}\n", report.incidents, report.detected);
        for (const auto& [node, count] : report.per_node_incidents) {
            std::cout << fmt::format("node {}: {}\n", node, count);
        }
    }
    if (!g.quiet) {
        double confirm_sum = 0.0;
        size_t confirmed = 0;
        for (const auto& b : chain.blocks) {
            for (const auto& tx : b.transactions) {
                if (tx.confirmed_time) {
                    confirm_sum += *tx.confirmed_time - tx.submit_time;
                    ++confirmed;
                }
            }
        }
        if (confirmed > 0) {
            std::cerr << fmt::format("mean confirmation latency: {:.6g} s\n",
                                     confirm_sum / static_cast<double>(confirmed));
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fogsim: DRL-driven task offloading simulator for IoT/fog/cloud topologies"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--out-dir", g.out_dir, "Directory for result files");
    app.add_option("--seed", g.seed, "Override the config seed list with a single seed");
    app.add_flag("--quiet", g.quiet, "Suppress progress output");

    std::string config_path, checkpoint_path, policy, demand_path, chain_path, honest_path;
    bool export_chains = false;
    double delta_max = 0.0;

    auto* run = app.add_subcommand("run", "Run every (policy, seed) cell of an experiment");
    run->fallthrough();
    run->add_option("config", config_path, "Experiment config JSON")->required();
    run->add_flag("--export-chains", export_chains, "Write per-cell ledger exports");

    auto* train_cmd = app.add_subcommand("train", "Train the DQN agent and write a checkpoint");
    train_cmd->fallthrough();
    train_cmd->add_option("config", config_path, "Experiment config JSON")->required();
    train_cmd->add_option("-o,--output", checkpoint_path, "Checkpoint path")->required();

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate one policy across the config seeds");
    eval_cmd->fallthrough();
    eval_cmd->add_option("config", config_path, "Experiment config JSON")->required();
    eval_cmd->add_option("--policy", policy, "Policy name")->required();
    eval_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint for the dqn policy");

    auto* analyze = app.add_subcommand("analyze", "Offline analyses");
    analyze->fallthrough();
    analyze->require_subcommand(1);
    auto* dbf_cmd = analyze->add_subcommand("dbf", "Demand-bound analysis of a C,T,D demand file");
    dbf_cmd->fallthrough();
    dbf_cmd->add_option("demand-file", demand_path, "One stream per line: C,T,D")->required();
    dbf_cmd->add_option("--delta-max", delta_max, "Analysis window (default: twice the hyperperiod)");

    auto* audit_cmd = app.add_subcommand("audit", "Verify an exported chain file");
    audit_cmd->fallthrough();
    audit_cmd->add_option("chain-file", chain_path, "Chain export to verify")->required();
    audit_cmd->add_option("--honest", honest_path, "Honest digest sidecar for incident counting");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, g, export_chains);
        if (train_cmd->parsed()) return cmd_train(config_path, checkpoint_path, g);
        if (eval_cmd->parsed()) return cmd_eval(config_path, policy, checkpoint_path, g);
        if (analyze->parsed()) return cmd_analyze_dbf(demand_path, delta_max);
        if (audit_cmd->parsed()) return cmd_audit(chain_path, honest_path, g);
    } catch (const ConfigError& e) {
        std::cerr << "config error:\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
