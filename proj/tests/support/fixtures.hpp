#pragma once

#include <fmt/format.h>

#include <string>
#include <vector>

#include "fogsim/config.hpp"
#include "fogsim/simcore.hpp"
#include "fogsim/topology.hpp"
#include "fogsim/workload.hpp"

namespace fixtures {

// Small three-tier topology: IoT devices at capacity 2, fog nodes at 10,
// one cloud at 50. Fog links are short, the cloud link is faster in compute
// but farther away.
inline fogsim::TopologyConfig topology_config(int n_iot, int n_fog) {
    fogsim::TopologyConfig cfg;
    for (int i = 0; i < n_iot; ++i) {
        cfg.nodes.push_back({fmt::format("iot{}", i), fogsim::Tier::Iot, 2.0, 2.0, 0.5, false});
    }
    for (int f = 0; f < n_fog; ++f) {
        cfg.nodes.push_back({fmt::format("fog{}", f), fogsim::Tier::Fog, 10.0, 15.0, 3.0, false});
    }
    cfg.nodes.push_back({"cloud", fogsim::Tier::Cloud, 50.0, 100.0, 20.0, false});
    for (int i = 0; i < n_iot; ++i) {
        for (int f = 0; f < n_fog; ++f) {
            cfg.links.push_back({fmt::format("iot{}", i), fmt::format("fog{}", f), 20.0, 0.02, 1.0});
        }
        cfg.links.push_back({fmt::format("iot{}", i), "cloud", 15.0, 0.2, 1.5});
    }
    return cfg;
}

inline fogsim::Topology topology(int n_iot = 1, int n_fog = 1) {
    return fogsim::Topology::build(topology_config(n_iot, n_fog));
}

inline fogsim::TaskStream stream(std::string id, double period, double deadline, double size,
                                 std::string source = "iot0",
                                 fogsim::ArrivalKind kind = fogsim::ArrivalKind::Periodic) {
    return fogsim::TaskStream{std::move(id), period, deadline, size, std::move(source), kind};
}

// Always picks a fixed action index.
class FixedPolicy : public fogsim::Policy {
public:
    explicit FixedPolicy(int action) : action_(action) {}
    int decide(const fogsim::DecisionContext&) override { return action_; }
    std::string name() const override { return "fixed"; }

private:
    int action_;
};

// Stable textual fingerprint of a trace for bit-identity checks.
inline std::string trace_fingerprint(const fogsim::EpisodeTrace& t) {
    std::string s;
    for (const auto& d : t.decisions) {
        s += fmt::format("{}|{}|{}|{}|{}|{}|{}|{}|", d.job_id, d.action, d.reward,
                         d.outcome.completion_time, d.outcome.latency, d.outcome.energy,
                         d.outcome.deadline_met, d.outcome.corrupted);
        for (double v : d.state) s += fmt::format("{};", v);
        s += "|";
        for (double v : d.next_state) s += fmt::format("{};", v);
        s += "\n";
    }
    const auto& m = t.metrics;
    s += fmt::format("m:{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}", m.scheduled, m.completed, m.missed,
                     m.corrupted, m.sched_ratio, m.mean_latency, m.p95_latency, m.total_energy,
                     m.incidents, m.detected, m.mean_reward);
    return s;
}

}  // namespace fixtures
