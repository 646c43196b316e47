#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fogsim/agent.hpp"
#include "fogsim/mdp.hpp"
#include "fogsim/rng.hpp"

namespace fogsim {

// Per-target inputs the engine exposes at each decision. Index matches the
// action-space order [Local, Fog 1..N, Cloud].
struct TargetEstimate {
    double tx_time = 0.0;
    double exec_time = 0.0;
    double backlog_seconds = 0.0;  // queued work ahead of this job, in seconds
};

struct DecisionContext {
    const MdpState& state;
    const std::vector<TargetEstimate>& estimates;
    double now = 0.0;
    Rng& rng;  // per-episode policy sub-stream

    int action_count() const { return static_cast<int>(estimates.size()); }
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual int decide(const DecisionContext& ctx) = 0;
    virtual void begin_episode() {}
    virtual std::string name() const = 0;
};

// Baseline decision rules.
int decide_random(int action_count, Rng& rng);
int decide_round_robin(uint64_t counter, int action_count);
// Argmin of tx + queued work + execution over targets; ties to the lowest
// index. Sees true backlogs and ignores security history.
int decide_greedy(std::span<const TargetEstimate> estimates);

class RandomPolicy : public Policy {
public:
    int decide(const DecisionContext& ctx) override { return decide_random(ctx.action_count(), ctx.rng); }
    std::string name() const override { return "random"; }
};

class RoundRobinPolicy : public Policy {
public:
    int decide(const DecisionContext& ctx) override {
        return decide_round_robin(counter_++, ctx.action_count());
    }
    void begin_episode() override { counter_ = 0; }
    std::string name() const override { return "round_robin"; }

private:
    uint64_t counter_ = 0;
};

class GreedyPolicy : public Policy {
public:
    int decide(const DecisionContext& ctx) override { return decide_greedy(ctx.estimates); }
    std::string name() const override { return "greedy"; }
};

class LocalOnlyPolicy : public Policy {
public:
    int decide(const DecisionContext&) override { return 0; }
    std::string name() const override { return "local_only"; }
};

class CloudOnlyPolicy : public Policy {
public:
    int decide(const DecisionContext& ctx) override { return ctx.action_count() - 1; }
    std::string name() const override { return "cloud_only"; }
};

// Greedy over a trained Q-network; epsilon > 0 gives the training behavior.
class DqnPolicy : public Policy {
public:
    explicit DqnPolicy(QNetwork net, double epsilon = 0.0)
        : net_(std::move(net)), epsilon_(epsilon) {}

    int decide(const DecisionContext& ctx) override {
        return select_action(q_forward(net_, ctx.state), epsilon_, ctx.rng);
    }
    std::string name() const override { return "dqn"; }

    const QNetwork& network() const { return net_; }

private:
    QNetwork net_;
    double epsilon_;
};

// Factory for the non-learning policies by config name.
std::unique_ptr<Policy> make_baseline_policy(const std::string& name);

}  // namespace fogsim
