#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogsim/agent.hpp"
#include "fogsim/attacks.hpp"
#include "fogsim/ledger.hpp"
#include "fogsim/reward.hpp"
#include "fogsim/sha256.hpp"
#include "fogsim/topology.hpp"
#include "fogsim/workload.hpp"

namespace fogsim {

// One experiment = one JSON document: topology, streams, policies, training,
// ledger, attack, reward weights, seeds and horizon.
struct ExperimentConfig {
    double horizon = 500.0;
    std::vector<uint64_t> seeds;
    TopologyConfig topology;
    std::vector<TaskStream> streams;
    std::vector<std::string> policies;
    TrainingConfig training;
    LedgerConfig ledger;
    AttackConfig attack;
    RewardWeights reward;
    int state_layout_version = 1;
};

// Parses and validates, collecting every violation with its field path.
// Throws ConfigError when anything is wrong.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical echo: keys sorted (nlohmann's default object ordering), defaults
// materialized. Equal logical configs produce equal bytes.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// SHA-256 of the canonical JSON dump; recorded in every output row.
Digest config_digest(const ExperimentConfig& cfg);

}  // namespace fogsim
