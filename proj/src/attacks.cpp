#include "fogsim/attacks.hpp"

#include <cmath>
#include <stdexcept>

namespace fogsim {

void AttackConfig::validate() const {
    if (compromised_fraction < 0 || compromised_fraction > 1) {
        throw std::invalid_argument("attack.compromised_fraction: must be in [0, 1]");
    }
    if (tamper_probability < 0 || tamper_probability > 1) {
        throw std::invalid_argument("attack.tamper_probability: must be in [0, 1]");
    }
}

std::set<std::string> mark_compromised(const Topology& topology, double fraction, uint64_t seed) {
    if (fraction < 0 || fraction > 1) {
        throw std::invalid_argument("mark_compromised: fraction must be in [0, 1]");
    }
    const auto& fogs = topology.fog_ids();
    const size_t count = static_cast<size_t>(std::llround(fraction * static_cast<double>(fogs.size())));

    std::vector<std::string> pool = fogs;  // sorted by id
    Rng rng(seed);
    rng.shuffle(pool);

    std::set<std::string> chosen;
    for (size_t i = 0; i < count && i < pool.size(); ++i) chosen.insert(pool[i]);
    return chosen;
}

Outcome maybe_tamper(const Outcome& honest, const NodeSpec& node, const AttackConfig& cfg, Rng& rng) {
    cfg.validate();
    if (node.tier != Tier::Fog || !node.compromised) return honest;
    if (!rng.bernoulli(cfg.tamper_probability)) return honest;
    Outcome tampered = honest;
    tampered.corrupted = true;
    tampered.deadline_met = false;
    return tampered;
}

SecurityReport audit(const Chain& chain, const HonestOracle& oracle) {
    const auto verdict = verify_chain(chain);
    if (!verdict.ok) {
        throw std::runtime_error("audit: chain integrity violated at block " +
                                 std::to_string(verdict.bad_index) + " (" + to_string(verdict.reason) + ")");
    }

    SecurityReport report;
    for (const auto& info : oracle) {
        if (info.second.corrupted) ++report.incidents;
    }
    for (const auto& block : chain.blocks) {
        for (const auto& rec : block.transactions) {
            auto it = oracle.find(rec.record_id);
            if (it == oracle.end()) {
                throw std::runtime_error("audit: record " + std::to_string(rec.record_id) +
                                         " missing from the honest trace");
            }
            if (rec.outcome_digest != it->second.honest_digest) {
                ++report.detected;
                ++report.per_node_incidents[it->second.node_id];
            }
        }
    }
    return report;
}

}  // namespace fogsim
