#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "fogsim/ledger.hpp"
#include "fogsim/outcome.hpp"
#include "fogsim/rng.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

// Compromised-fog-node model: a fixed fraction of fog nodes corrupt results
// with the given probability per executed job. IoT devices and the cloud are
// never compromised.
struct AttackConfig {
    double compromised_fraction = 0.0;
    double tamper_probability = 0.0;
    uint64_t seed = 0;

    void validate() const;
};

struct SecurityReport {
    uint64_t incidents = 0;  // corrupted outcomes, ground truth
    uint64_t detected = 0;   // digest mismatches found via the ledger
    std::map<std::string, uint64_t> per_node_incidents;
};

// round(fraction * N_fog) distinct fog nodes, drawn uniformly from the seeded
// generator. Deterministic for equal (topology, fraction, seed).
std::set<std::string> mark_compromised(const Topology& topology, double fraction, uint64_t seed);

// Pass-through on honest nodes. On a compromised node, with tamper_probability
// the outcome comes back corrupted (its digest then diverges from the honest
// encoding, so ledger-side detection is exact).
Outcome maybe_tamper(const Outcome& honest, const NodeSpec& node, const AttackConfig& cfg, Rng& rng);

// Ground truth per record, exported by the engine for post-run audit.
struct HonestRecordInfo {
    Digest honest_digest{};
    std::string node_id;
    bool corrupted = false;
};
using HonestOracle = std::map<uint64_t, HonestRecordInfo>;  // keyed by record id

// Recomputes every committed record's digest against the honest trace.
// Refuses (throws std::runtime_error) if the chain itself fails verification.
SecurityReport audit(const Chain& chain, const HonestOracle& oracle);

}  // namespace fogsim
