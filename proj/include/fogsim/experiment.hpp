#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogsim/config.hpp"
#include "fogsim/metrics.hpp"
#include "fogsim/simcore.hpp"

namespace fogsim {

struct ResultRow {
    std::string policy;
    uint64_t seed = 0;
    RunMetrics metrics;
    std::string config_digest_hex;
    double wall_clock_s = 0.0;  // JSON sidecar only, never in the CSV
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

// Exact CSV surface.
std::string csv_header();
std::string csv_row(const ResultRow& row);
std::string table_to_csv(const ResultTable& table);

struct RunOptions {
    std::optional<QNetwork> pretrained;  // skip training and evaluate this network
    bool keep_chains = false;            // retain per-cell chains in the artifacts
    std::ostream* log = nullptr;         // progress lines; null = quiet
};

struct ExperimentArtifacts {
    std::optional<QNetwork> trained;
    std::vector<EpisodePoint> curve;
    uint64_t gradient_steps = 0;
    // keyed "<policy>:<seed>"; filled when keep_chains is set
    std::map<std::string, Chain> chains;
    std::map<std::string, HonestOracle> honest;
};

// One row per (policy, seed), rows sorted by (policy, seed) regardless of
// execution order. A dqn policy is trained first (from training.seed), then
// evaluated greedily on the config seeds. Rows can also be appended to a
// stream as they finish via `row_sink`.
ResultTable run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {},
                           ExperimentArtifacts* artifacts = nullptr,
                           std::ostream* row_sink = nullptr);

// A single (policy, seed) cell; reproduces the corresponding batch row.
ResultRow run_cell(const ExperimentConfig& cfg, const Topology& topology, const std::string& policy,
                   uint64_t seed, const QNetwork* dqn_network, Chain* chain_out = nullptr,
                   HonestOracle* honest_out = nullptr);

struct MetricDelta {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

// Candidate minus baseline per metric per seed, aggregated across seeds.
// Requires both policies present with identical seed sets.
std::map<std::string, MetricDelta> compare(const ResultTable& table, const std::string& baseline,
                                           const std::string& candidate);

}  // namespace fogsim
