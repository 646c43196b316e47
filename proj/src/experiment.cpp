#include "fogsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <ostream>
#include <stdexcept>

#include "fogsim/policies.hpp"

namespace fogsim {

std::string csv_header() {
    return "policy,seed,scheduled,completed,misses,sched_ratio,mean_latency,p95_latency,"
           "total_energy,incidents,detected,mean_confirm_latency,mean_reward,config_digest";
}

std::string csv_row(const ResultRow& row) {
    const RunMetrics& m = row.metrics;
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", row.policy, row.seed,
                       m.scheduled, m.completed, m.missed, m.sched_ratio, m.mean_latency,
                       m.p95_latency, m.total_energy, m.incidents, m.detected,
                       m.mean_confirm_latency, m.mean_reward, row.config_digest_hex);
}

std::string table_to_csv(const ResultTable& table) {
    std::string out = csv_header() + "\n";
    for (const auto& row : table.rows) out += csv_row(row) + "\n";
    return out;
}

ResultRow run_cell(const ExperimentConfig& cfg, const Topology& topology, const std::string& policy,
                   uint64_t seed, const QNetwork* dqn_network, Chain* chain_out,
                   HonestOracle* honest_out) {
    std::unique_ptr<Policy> p;
    if (policy == "dqn") {
        if (!dqn_network) throw std::invalid_argument("dqn policy requires a trained network");
        p = std::make_unique<DqnPolicy>(*dqn_network, 0.0);
    } else {
        p = make_baseline_policy(policy);
    }

    const auto started = std::chrono::steady_clock::now();
    EpisodeTrace trace = run_episode(topology, cfg.streams, *p, cfg.ledger, cfg.attack, cfg.reward,
                                     cfg.horizon, seed);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);

    if (chain_out && trace.chain) *chain_out = std::move(*trace.chain);
    if (honest_out) *honest_out = std::move(trace.honest);

    ResultRow row;
    row.policy = policy;
    row.seed = seed;
    row.metrics = std::move(trace.metrics);
    row.config_digest_hex = to_hex(config_digest(cfg));
    row.wall_clock_s = elapsed.count();
    return row;
}

ResultTable run_experiment(const ExperimentConfig& cfg, const RunOptions& opts,
                           ExperimentArtifacts* artifacts, std::ostream* row_sink) {
    const Topology topology = Topology::build(cfg.topology);

    std::vector<std::string> policies = cfg.policies;
    std::sort(policies.begin(), policies.end());
    std::vector<uint64_t> seeds = cfg.seeds;
    std::sort(seeds.begin(), seeds.end());

    std::optional<QNetwork> dqn;
    const bool wants_dqn = std::find(policies.begin(), policies.end(), "dqn") != policies.end();
    if (wants_dqn) {
        if (opts.pretrained) {
            dqn = *opts.pretrained;
        } else {
            if (opts.log) *opts.log << "training dqn: " << cfg.training.episodes << " episodes\n";
            TrainResult tr = train(topology, cfg.streams, cfg.training, cfg.ledger, cfg.attack,
                                   cfg.reward);
            if (artifacts) {
                artifacts->curve = tr.curve;
                artifacts->gradient_steps = tr.gradient_steps;
            }
            dqn = std::move(tr.network);
        }
        if (artifacts) artifacts->trained = dqn;
    }

    ResultTable table;
    if (row_sink) *row_sink << csv_header() << "\n" << std::flush;
    for (const auto& policy : policies) {
        for (uint64_t seed : seeds) {
            Chain chain;
            HonestOracle honest;
            const bool keep = opts.keep_chains && cfg.ledger.enabled;
            ResultRow row = run_cell(cfg, topology, policy, seed, dqn ? &*dqn : nullptr,
                                     keep ? &chain : nullptr, keep ? &honest : nullptr);
            if (keep && artifacts) {
                const std::string key = fmt::format("{}:{}", policy, seed);
                artifacts->chains.emplace(key, std::move(chain));
                artifacts->honest.emplace(key, std::move(honest));
            }
            if (row_sink) *row_sink << csv_row(row) << "\n" << std::flush;
            if (opts.log) {
                *opts.log << fmt::format("{} seed {}: sched_ratio {:.3f}, incidents {}\n", policy,
                                         seed, row.metrics.sched_ratio, row.metrics.incidents);
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

namespace {

std::map<std::string, double> metric_values(const RunMetrics& m) {
    return {{"scheduled", static_cast<double>(m.scheduled)},
            {"completed", static_cast<double>(m.completed)},
            {"misses", static_cast<double>(m.missed)},
            {"sched_ratio", m.sched_ratio},
            {"mean_latency", m.mean_latency},
            {"p95_latency", m.p95_latency},
            {"total_energy", m.total_energy},
            {"incidents", static_cast<double>(m.incidents)},
            {"detected", static_cast<double>(m.detected)},
            {"mean_confirm_latency", m.mean_confirm_latency},
            {"mean_reward", m.mean_reward}};
}

}  // namespace

std::map<std::string, MetricDelta> compare(const ResultTable& table, const std::string& baseline,
                                           const std::string& candidate) {
    std::map<uint64_t, const ResultRow*> base, cand;
    for (const auto& row : table.rows) {
        if (row.policy == baseline) base[row.seed] = &row;
        if (row.policy == candidate) cand[row.seed] = &row;
    }
    if (base.empty()) throw std::invalid_argument("compare: baseline policy not in table: " + baseline);
    if (cand.empty()) throw std::invalid_argument("compare: candidate policy not in table: " + candidate);

    std::vector<uint64_t> base_seeds, cand_seeds;
    for (const auto& [s, _] : base) base_seeds.push_back(s);
    for (const auto& [s, _] : cand) cand_seeds.push_back(s);
    if (base_seeds != cand_seeds) {
        throw std::invalid_argument("compare: seed sets differ between policies");
    }

    std::map<std::string, std::vector<double>> deltas;
    for (uint64_t seed : base_seeds) {
        const auto bv = metric_values(base[seed]->metrics);
        const auto cv = metric_values(cand[seed]->metrics);
        for (const auto& [name, b] : bv) deltas[name].push_back(cv.at(name) - b);
    }

    std::map<std::string, MetricDelta> out;
    for (const auto& [name, values] : deltas) {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size());
        out[name] = MetricDelta{mean, std::sqrt(var)};
    }
    return out;
}

}  // namespace fogsim
