#include "fogsim/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "fogsim/schedulability.hpp"

namespace fogsim {

std::vector<Transition> EpisodeTrace::transitions() const {
    std::vector<Transition> out;
    out.reserve(decisions.size());
    for (const auto& d : decisions) {
        out.push_back(Transition{d.state, d.action, d.reward, d.next_state, d.done});
    }
    return out;
}

MdpState build_state(const StateInputs& in) {
    MdpState s;
    s.reserve(in.backlog_seconds.size() + in.corruption_rate.size() + 3);
    const double dl = in.relative_deadline > 0 ? in.relative_deadline : 1.0;
    for (double b : in.backlog_seconds) s.push_back(std::clamp(b / dl, 0.0, 1.0));
    for (double c : in.corruption_rate) s.push_back(std::clamp(c, 0.0, 1.0));
    s.push_back(std::clamp(in.max_job_size > 0 ? in.job_size / in.max_job_size : 1.0, 0.0, 1.0));
    s.push_back(std::clamp(in.slack_seconds / dl, 0.0, 1.0));
    s.push_back(std::clamp(in.horizon > 0 ? in.now / in.horizon : 0.0, 0.0, 1.0));
    return s;
}

namespace {

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
    }
};

struct JobRuntime {
    TaskInstance inst;
    size_t stream_index = 0;
    size_t decision = SIZE_MAX;
    OffloadTarget target;
    double tx_time = 0.0;
    double exec_time = 0.0;
    double tx_power = 0.0;
    bool remote = false;
    bool tx_done = false;
    double service_start = -1.0;
    bool finished = false;
};

struct NodeRuntime {
    std::set<std::pair<double, uint64_t>> waiting;  // (absolute deadline, job index)
    double waiting_work = 0.0;                      // seconds of queued execution
    std::optional<uint64_t> running;
    double running_finish = 0.0;
    uint64_t confirmed = 0;   // ledger-confirmed records executed here
    uint64_t mismatches = 0;  // of those, digest mismatches
};

struct PendingConfirm {
    double time = 0.0;
    uint64_t record_id = 0;
    std::string node_id;
    bool mismatch = false;
};

struct ConfirmAfter {
    bool operator()(const PendingConfirm& a, const PendingConfirm& b) const {
        return std::tie(a.time, a.record_id) > std::tie(b.time, b.record_id);
    }
};

class Engine {
public:
    Engine(const Topology& base_topology, const std::vector<TaskStream>& streams,
           const LedgerConfig& ledger_cfg, const AttackConfig& attack_cfg,
           const RewardWeights& weights, double horizon, uint64_t seed)
        : streams_(streams),
          ledger_cfg_(ledger_cfg),
          attack_(attack_cfg),
          weights_(weights),
          horizon_(horizon),
          policy_rng_(derive_seed(seed, "policy")),
          tamper_rng_(derive_seed(splitmix64(seed ^ splitmix64(attack_cfg.seed)), "tamper")),
          topology_(apply_attack(base_topology, attack_cfg)) {
        if (!(horizon > 0)) throw std::invalid_argument("run_episode: horizon must be > 0");
        weights_.validate();

        for (const auto& n : topology_.nodes()) nodes_[n.id];

        // Per-stream action spaces and slot parameters.
        max_size_ = 0.0;
        const auto& cloud = topology_.node(topology_.cloud_id());
        double mean_cloud_exec = 0.0;
        actions_.resize(streams_.size());
        slots_.resize(streams_.size());
        for (size_t i = 0; i < streams_.size(); ++i) {
            const auto& st = streams_[i];
            validate_stream(st);
            actions_[i] = topology_.action_space(st.source);
            for (const auto& a : actions_[i]) {
                if (a.kind == OffloadTarget::Kind::Local) {
                    slots_[i].push_back(slot_parameters(st, topology_.node(a.node_id)));
                } else {
                    slots_[i].push_back(slot_parameters(st, topology_.node(a.node_id),
                                                        topology_.link(st.source, a.node_id)));
                }
            }
            max_size_ = std::max(max_size_, st.size);
            mean_cloud_exec += st.size / cloud.capacity;
        }
        if (!streams_.empty()) mean_cloud_exec /= static_cast<double>(streams_.size());
        energy_ref_ = cloud.busy_power * mean_cloud_exec;

        // Release all jobs up front; ties in release time keep stream order.
        for (size_t i = 0; i < streams_.size(); ++i) {
            const uint64_t stream_seed = derive_seed(seed, "arrivals/" + streams_[i].id);
            for (auto& inst : generate_jobs(streams_[i], horizon_, stream_seed)) {
                JobRuntime j;
                j.inst = std::move(inst);
                j.stream_index = i;
                jobs_.push_back(std::move(j));
            }
        }
        std::stable_sort(jobs_.begin(), jobs_.end(), [](const JobRuntime& a, const JobRuntime& b) {
            return a.inst.release_time < b.inst.release_time;
        });
        for (size_t k = 0; k < jobs_.size(); ++k) jobs_[k].inst.job_id = k;

        if (ledger_cfg_.enabled) chain_ = make_chain(ledger_cfg_);
    }

    EpisodeTrace run(Policy& policy, DecisionHooks* hooks) {
        policy_ = &policy;
        hooks_ = hooks;
        policy.begin_episode();

        for (size_t k = 0; k < jobs_.size(); ++k) {
            schedule(jobs_[k].inst.release_time, EventKind::JobRelease, k);
        }

        while (!events_.empty() && events_.top().time <= horizon_) {
            const Event e = events_.top();
            events_.pop();
            dispatch(e);
        }
        finish_episode();

        EpisodeTrace trace;
        trace.decisions = std::move(decisions_);
        trace.honest = honest_;
        if (chain_) trace.chain = std::move(*chain_);
        trace.metrics = compute_metrics(trace);
        return trace;
    }

private:
    static Topology apply_attack(const Topology& base, const AttackConfig& attack) {
        attack.validate();
        return base.with_compromised(
            mark_compromised(base, attack.compromised_fraction, attack.seed));
    }

    void schedule(double time, EventKind kind, uint64_t payload) {
        events_.push(Event{time, seq_++, kind, payload});
    }

    void dispatch(const Event& e) {
        switch (e.kind) {
            case EventKind::JobRelease: on_release(e.payload, e.time); break;
            case EventKind::TxComplete: on_tx_complete(e.payload, e.time); break;
            case EventKind::ExecComplete: on_exec_complete(e.payload, e.time); break;
            case EventKind::BlockMined: on_block_mined(e.time); break;
            case EventKind::EpisodeEnd: break;
        }
    }

    double backlog_seconds(const std::string& node_id, double now) const {
        const auto& nr = nodes_.at(node_id);
        double b = nr.waiting_work;
        if (nr.running) b += std::max(0.0, nr.running_finish - now);
        return b;
    }

    double corruption_rate(const std::string& node_id) const {
        const auto& nr = nodes_.at(node_id);
        if (nr.confirmed == 0) return 0.0;
        return static_cast<double>(nr.mismatches) / static_cast<double>(nr.confirmed);
    }

    MdpState observe_state(const JobRuntime& job, double now) {
        advance_trust(now);
        const auto& acts = actions_[job.stream_index];
        StateInputs in;
        in.backlog_seconds.reserve(acts.size());
        for (const auto& a : acts) in.backlog_seconds.push_back(backlog_seconds(a.node_id, now));
        for (const auto& fog : topology_.fog_ids()) in.corruption_rate.push_back(corruption_rate(fog));
        in.corruption_rate.push_back(corruption_rate(topology_.cloud_id()));
        in.job_size = job.inst.size;
        in.max_job_size = max_size_;
        in.relative_deadline = streams_[job.stream_index].deadline;
        in.slack_seconds = job.inst.absolute_deadline - now;
        in.now = now;
        in.horizon = horizon_;
        return build_state(in);
    }

    void on_release(uint64_t ji, double now) {
        JobRuntime& job = jobs_[ji];
        MdpState state = observe_state(job, now);

        // The new observation is the successor state of the previous decision.
        if (!decisions_.empty() && !next_set_.back()) {
            decisions_.back().next_state = state;
            next_set_.back() = true;
        }

        const auto& acts = actions_[job.stream_index];
        std::vector<TargetEstimate> estimates;
        estimates.reserve(acts.size());
        for (size_t a = 0; a < acts.size(); ++a) {
            estimates.push_back(TargetEstimate{slots_[job.stream_index][a].tx_time,
                                               slots_[job.stream_index][a].exec_time,
                                               backlog_seconds(acts[a].node_id, now)});
        }

        DecisionContext ctx{state, estimates, now, policy_rng_};
        const int action = policy_->decide(ctx);
        if (action < 0 || action >= static_cast<int>(acts.size())) {
            throw std::runtime_error("policy returned an out-of-range action");
        }

        DecisionRecord d;
        d.job_id = job.inst.job_id;
        d.stream_id = job.inst.stream_id;
        d.decision_time = now;
        d.state = std::move(state);
        d.action = action;
        d.target = acts[static_cast<size_t>(action)];
        d.admitted = check_admission(job.stream_index, d.target.node_id);
        if (!d.admitted) ++admission_violations_;
        job.decision = decisions_.size();
        decisions_.push_back(std::move(d));
        next_set_.push_back(false);
        reward_set_.push_back(false);

        execute_offload(ji, now);
        flush_ready();
        if (hooks_) hooks_->after_decision();
    }

    // The demand a stream imposes follows its most recent routing decision:
    // it is removed from the previous node and re-admitted at the new one.
    bool check_admission(size_t stream_index, const std::string& node_id) {
        auto prev = stream_home_.find(stream_index);
        if (prev != stream_home_.end()) node_demands_[prev->second].erase(stream_index);
        stream_home_[stream_index] = node_id;

        const auto& st = streams_[stream_index];
        StreamDemand cand{st.size / topology_.node(node_id).capacity, st.period, st.deadline};

        std::vector<StreamDemand> others;
        for (const auto& [idx, dem] : node_demands_[node_id]) {
            (void)idx;
            others.push_back(dem);
        }
        std::vector<StreamDemand> all = others;
        all.push_back(cand);
        const bool ok = admit(others, cand, default_delta_max(all));
        node_demands_[node_id][stream_index] = cand;
        return ok;
    }

    void execute_offload(uint64_t ji, double now) {
        JobRuntime& job = jobs_[ji];
        const DecisionRecord& d = decisions_[job.decision];
        job.target = d.target;
        const SlotParams& sp = slots_[job.stream_index][static_cast<size_t>(d.action)];
        job.exec_time = sp.exec_time;
        job.tx_time = sp.tx_time;
        job.inst.status = JobStatus::Offloaded;

        if (d.target.kind == OffloadTarget::Kind::Local) {
            job.remote = false;
            enqueue(d.target.node_id, ji, now);
        } else {
            job.remote = true;
            job.tx_power = topology_.link(streams_[job.stream_index].source, d.target.node_id).tx_power;
            schedule(now + job.tx_time, EventKind::TxComplete, ji);
        }
    }

    void on_tx_complete(uint64_t ji, double now) {
        JobRuntime& job = jobs_[ji];
        if (job.finished) return;
        job.tx_done = true;
        enqueue(job.target.node_id, ji, now);
    }

    // Non-preemptive EDF: an idle node serves immediately; otherwise the job
    // waits and the earliest absolute deadline (ties by job id) goes next.
    void enqueue(const std::string& node_id, uint64_t ji, double now) {
        NodeRuntime& nr = nodes_[node_id];
        if (!nr.running) {
            start_service(nr, ji, now);
        } else {
            nr.waiting.insert({jobs_[ji].inst.absolute_deadline, ji});
            nr.waiting_work += jobs_[ji].exec_time;
        }
    }

    void start_service(NodeRuntime& nr, uint64_t ji, double now) {
        JobRuntime& job = jobs_[ji];
        nr.running = ji;
        nr.running_finish = now + job.exec_time;
        job.service_start = now;
        schedule(nr.running_finish, EventKind::ExecComplete, ji);
    }

    void on_exec_complete(uint64_t ji, double now) {
        JobRuntime& job = jobs_[ji];
        if (job.finished) return;
        NodeRuntime& nr = nodes_[job.target.node_id];
        nr.running.reset();

        const NodeSpec& node = topology_.node(job.target.node_id);
        Outcome honest;
        honest.job_id = job.inst.job_id;
        honest.target = job.target;
        honest.completion_time = now;
        honest.latency = now - job.inst.release_time;
        honest.energy = job.tx_power * job.tx_time + node.busy_power * job.exec_time;
        honest.deadline_met = now <= job.inst.absolute_deadline;
        honest.corrupted = false;

        const Outcome delivered = maybe_tamper(honest, node, attack_, tamper_rng_);
        finalize_job(ji, honest, delivered, now, /*executed=*/true);

        if (!nr.waiting.empty()) {
            const auto head = *nr.waiting.begin();
            nr.waiting.erase(nr.waiting.begin());
            nr.waiting_work -= jobs_[head.second].exec_time;
            start_service(nr, head.second, now);
        }
        flush_ready();
    }

    void finalize_job(uint64_t ji, const Outcome& honest, const Outcome& delivered, double now,
                      bool executed) {
        JobRuntime& job = jobs_[ji];
        job.finished = true;
        job.inst.status = delivered.corrupted    ? JobStatus::Corrupted
                          : delivered.deadline_met ? JobStatus::Completed
                                                   : JobStatus::Missed;

        DecisionRecord& d = decisions_[job.decision];
        d.outcome = delivered;
        d.honest_digest = outcome_digest(honest);
        d.service_start = job.service_start;
        d.completed_execution = executed;
        d.reward = compute_reward(delivered, streams_[job.stream_index].deadline, energy_ref_, weights_);
        reward_set_[job.decision] = true;

        if (chain_) {
            OffloadRecord rec;
            rec.record_id = record_seq_++;
            rec.job_id = job.inst.job_id;
            rec.action = static_cast<uint32_t>(d.action);
            rec.outcome_digest = outcome_digest(delivered);
            rec.submit_time = now;
            rec.record_deadline = job.inst.absolute_deadline;
            honest_[rec.record_id] =
                HonestRecordInfo{d.honest_digest, job.target.node_id, delivered.corrupted};
            pending_.push_back(std::move(rec));
            if (!miner_busy_ && !draining_) start_mining(now);
        }
    }

    void start_mining(double now) {
        const MineResult res = mine_block(*chain_, pending_, now);
        miner_busy_ = true;
        schedule(now + res.duration, EventKind::BlockMined, res.block_index);
        for (const auto& tx : chain_->blocks[res.block_index].transactions) {
            const auto& info = honest_.at(tx.record_id);
            confirms_.push(PendingConfirm{res.confirmed_time, tx.record_id, info.node_id,
                                          tx.outcome_digest != info.honest_digest});
        }
    }

    void on_block_mined(double now) {
        miner_busy_ = false;
        if (!pending_.empty()) start_mining(now);
    }

    void advance_trust(double now) {
        while (!confirms_.empty() && confirms_.top().time <= now) {
            const PendingConfirm c = confirms_.top();
            confirms_.pop();
            NodeRuntime& nr = nodes_[c.node_id];
            ++nr.confirmed;
            if (c.mismatch) ++nr.mismatches;
        }
    }

    void flush_ready() {
        while (emit_cursor_ < decisions_.size() && reward_set_[emit_cursor_] && next_set_[emit_cursor_]) {
            if (hooks_) {
                const DecisionRecord& d = decisions_[emit_cursor_];
                hooks_->on_transition_ready(Transition{d.state, d.action, d.reward, d.next_state, d.done});
            }
            ++emit_cursor_;
        }
    }

    void finish_episode() {
        // Jobs still in flight at the horizon count as missed, with latency
        // capped at twice the relative deadline and only the energy actually
        // spent by the horizon attributed. Their records all land in the
        // pending set before the miner picks the next block.
        draining_ = true;
        for (size_t ji = 0; ji < jobs_.size(); ++ji) {
            JobRuntime& job = jobs_[ji];
            if (job.finished) continue;
            const double deadline = streams_[job.stream_index].deadline;
            Outcome o;
            o.job_id = job.inst.job_id;
            o.target = job.target;
            o.latency = 2.0 * deadline;
            o.completion_time = job.inst.release_time + o.latency;
            double energy = 0.0;
            if (job.remote) {
                energy += job.tx_power * (job.tx_done ? job.tx_time
                                                      : horizon_ - job.inst.release_time);
            }
            if (job.service_start >= 0.0) {
                energy += topology_.node(job.target.node_id).busy_power * (horizon_ - job.service_start);
            }
            o.energy = energy;
            o.deadline_met = false;
            o.corrupted = false;
            finalize_job(ji, o, o, horizon_, /*executed=*/false);
        }

        if (!decisions_.empty()) {
            const size_t last = decisions_.size() - 1;
            if (!next_set_[last]) {
                decisions_[last].next_state = decisions_[last].state;
                next_set_[last] = true;
            }
            decisions_[last].done = true;
        }

        // Commit every outstanding record; the miner keeps running past the
        // horizon so confirmation metrics and audits cover the whole episode.
        if (chain_ && !miner_busy_ && !pending_.empty()) start_mining(horizon_);
        while (!events_.empty()) {
            const Event e = events_.top();
            events_.pop();
            if (e.kind == EventKind::BlockMined) on_block_mined(e.time);
        }

        flush_ready();
    }

    RunMetrics compute_metrics(const EpisodeTrace& trace) {
        RunMetrics m;
        m.scheduled = jobs_.size();
        std::vector<double> latencies;
        latencies.reserve(jobs_.size());
        double reward_sum = 0.0;
        for (const auto& d : trace.decisions) {
            latencies.push_back(d.outcome.latency);
            m.total_energy += d.outcome.energy;
            reward_sum += d.reward;
            if (d.outcome.corrupted) ++m.incidents;
        }
        for (const auto& job : jobs_) {
            switch (job.inst.status) {
                case JobStatus::Completed: ++m.completed; break;
                case JobStatus::Missed: ++m.missed; break;
                case JobStatus::Corrupted: ++m.corrupted; break;
                default: break;
            }
        }
        if (m.scheduled > 0) m.sched_ratio = schedulability_ratio(m.completed, m.scheduled);
        if (!latencies.empty()) {
            double sum = 0.0;
            for (double l : latencies) sum += l;
            m.mean_latency = sum / static_cast<double>(latencies.size());
            std::sort(latencies.begin(), latencies.end());
            const size_t rank = static_cast<size_t>(
                std::ceil(0.95 * static_cast<double>(latencies.size())));
            m.p95_latency = latencies[rank == 0 ? 0 : rank - 1];
        }
        if (!trace.decisions.empty()) {
            m.mean_reward = reward_sum / static_cast<double>(trace.decisions.size());
        }
        m.admission_violations = admission_violations_;

        if (trace.chain) {
            const SecurityReport report = audit(*trace.chain, trace.honest);
            m.detected = report.detected;
            m.per_node_incidents = report.per_node_incidents;
            double confirm_sum = 0.0;
            uint64_t confirm_count = 0;
            for (const auto& b : trace.chain->blocks) {
                for (const auto& tx : b.transactions) {
                    confirm_sum += confirmation_latency(tx);
                    ++confirm_count;
                }
            }
            if (confirm_count > 0) m.mean_confirm_latency = confirm_sum / static_cast<double>(confirm_count);
        }
        return m;
    }

    std::vector<TaskStream> streams_;
    LedgerConfig ledger_cfg_;
    AttackConfig attack_;
    RewardWeights weights_;
    double horizon_;
    Rng policy_rng_;
    Rng tamper_rng_;
    Topology topology_;

    std::vector<JobRuntime> jobs_;
    std::vector<std::vector<OffloadTarget>> actions_;  // per stream
    std::vector<std::vector<SlotParams>> slots_;       // per stream, per action
    std::map<std::string, NodeRuntime> nodes_;
    double max_size_ = 1.0;
    double energy_ref_ = 0.0;

    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    uint64_t seq_ = 0;

    std::vector<DecisionRecord> decisions_;
    std::vector<bool> next_set_;
    std::vector<bool> reward_set_;
    size_t emit_cursor_ = 0;

    std::optional<Chain> chain_;
    std::vector<OffloadRecord> pending_;
    bool miner_busy_ = false;
    bool draining_ = false;
    uint64_t record_seq_ = 0;
    HonestOracle honest_;
    std::priority_queue<PendingConfirm, std::vector<PendingConfirm>, ConfirmAfter> confirms_;

    // Admission bookkeeping: stream -> current node, node -> demand set.
    std::map<size_t, std::string> stream_home_;
    std::map<std::string, std::map<size_t, StreamDemand>> node_demands_;
    uint64_t admission_violations_ = 0;

    Policy* policy_ = nullptr;
    DecisionHooks* hooks_ = nullptr;
};

}  // namespace

EpisodeTrace run_episode(const Topology& topology, const std::vector<TaskStream>& streams,
                         Policy& policy, const LedgerConfig& ledger_cfg,
                         const AttackConfig& attack_cfg, const RewardWeights& weights,
                         double horizon, uint64_t seed, DecisionHooks* hooks) {
    Engine engine(topology, streams, ledger_cfg, attack_cfg, weights, horizon, seed);
    return engine.run(policy, hooks);
}

}  // namespace fogsim
