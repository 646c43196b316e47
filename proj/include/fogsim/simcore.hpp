#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fogsim/attacks.hpp"
#include "fogsim/ledger.hpp"
#include "fogsim/mdp.hpp"
#include "fogsim/metrics.hpp"
#include "fogsim/outcome.hpp"
#include "fogsim/policies.hpp"
#include "fogsim/reward.hpp"
#include "fogsim/topology.hpp"
#include "fogsim/workload.hpp"

namespace fogsim {

enum class EventKind { JobRelease, TxComplete, ExecComplete, BlockMined, EpisodeEnd };

// Events dequeue in (time, seq) order; seq is assigned at scheduling time so
// no two events share a key.
struct Event {
    double time = 0.0;
    uint64_t seq = 0;
    EventKind kind = EventKind::JobRelease;
    uint64_t payload = 0;  // job index or block index
};

// One offloading decision with everything needed to replay it.
struct DecisionRecord {
    uint64_t job_id = 0;
    std::string stream_id;
    double decision_time = 0.0;
    MdpState state;
    int action = 0;
    OffloadTarget target;
    double reward = 0.0;
    MdpState next_state;
    bool done = false;
    Outcome outcome;        // as delivered (possibly tampered)
    Digest honest_digest{}; // digest of the honestly computed outcome
    bool admitted = true;   // load-based admission verdict at decision time
    double service_start = -1.0;      // -1 when execution never began
    bool completed_execution = false; // ExecComplete fired within the horizon
};

struct EpisodeTrace {
    std::vector<DecisionRecord> decisions;  // decision order
    RunMetrics metrics;
    std::optional<Chain> chain;  // final chain when the ledger is enabled
    HonestOracle honest;         // ground truth per record id

    std::vector<Transition> transitions() const;
};

// Observer interface for online learners. on_transition_ready fires once per
// decision, in decision order, as soon as both its reward and successor state
// exist; after_decision fires exactly once per decision, after dispatch.
struct DecisionHooks {
    virtual ~DecisionHooks() = default;
    virtual void on_transition_ready(const Transition&) {}
    virtual void after_decision() {}
};

// State feature layout, per device with N fog nodes (all entries in [0, 1]):
//   [0, N+2)        queue backlog per target, seconds of work / D_i, clamped
//   [N+2, 2N+3)     ledger corruption rate per remote target (fogs, then cloud)
//   2N+3            job size / largest stream size
//   2N+4            deadline slack remaining / D_i
//   2N+5            episode time / horizon
constexpr size_t state_length(size_t fog_count) { return 2 * (fog_count + 2) + 2; }

struct StateInputs {
    std::vector<double> backlog_seconds;    // per action index
    std::vector<double> corruption_rate;    // fogs in action order, then cloud
    double job_size = 0.0;
    double max_job_size = 1.0;
    double relative_deadline = 1.0;
    double slack_seconds = 0.0;  // absolute deadline - now
    double now = 0.0;
    double horizon = 1.0;
};

MdpState build_state(const StateInputs& in);

// Runs one episode of the offloading loop: release -> observe -> decide ->
// transmit -> queue (non-preemptive EDF) -> execute -> reward + ledger record.
// Deterministic: identical inputs and seed give a bit-identical trace.
EpisodeTrace run_episode(const Topology& topology, const std::vector<TaskStream>& streams,
                         Policy& policy, const LedgerConfig& ledger_cfg,
                         const AttackConfig& attack_cfg, const RewardWeights& weights,
                         double horizon, uint64_t seed, DecisionHooks* hooks = nullptr);

}  // namespace fogsim
