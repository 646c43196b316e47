#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "fogsim/attacks.hpp"
#include "fogsim/ledger.hpp"
#include "fogsim/mdp.hpp"
#include "fogsim/reward.hpp"
#include "fogsim/rng.hpp"
#include "fogsim/sha256.hpp"
#include "fogsim/topology.hpp"
#include "fogsim/workload.hpp"

namespace fogsim {

// Dense layer, weights row-major [out][in], 64-bit floats.
struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;
    std::vector<double> b;
};

// Feed-forward Q-value approximator: affine layers with rectifier activations
// on the hidden layers, identity on the output.
struct QNetwork {
    std::vector<int> sizes;  // [input, hidden..., actions]
    std::vector<Layer> layers;

    // Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
    static QNetwork init(const std::vector<int>& sizes, uint64_t seed);

    int input_size() const { return sizes.front(); }
    int action_count() const { return sizes.back(); }
};

struct NetGrads {
    std::vector<Layer> layers;
    static NetGrads zeros_like(const QNetwork& net);
};

std::vector<double> q_forward(const QNetwork& net, std::span<const double> state);

// done => r; else r + gamma * max(next_q_target).
double bellman_target(double reward, double gamma, std::span<const double> next_q_target, bool done);
// Double-DQN variant: the online network picks the action, the target network rates it.
double bellman_target_double(double reward, double gamma, std::span<const double> next_q_target,
                             std::span<const double> next_q_online, bool done);

// Mean squared TD error over the batch and its gradient w.r.t. the online
// weights (target weights held constant). Only the taken action's output
// component carries error per sample.
std::pair<double, NetGrads> td_loss_and_grads(const QNetwork& online, const QNetwork& target,
                                              std::span<const Transition> batch, double gamma,
                                              bool double_dqn = false);

void sgd_step(QNetwork& net, const NetGrads& grads, double learning_rate);

// Epsilon-greedy: argmax (ties to the lowest index) with probability 1-eps,
// else uniform over all actions from the seeded generator.
int select_action(std::span<const double> q_values, double epsilon, Rng& rng);

inline QNetwork sync_target(const QNetwork& online) { return online; }

class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity);

    void push(Transition t);
    size_t size() const { return ring_.size(); }
    size_t capacity() const { return capacity_; }
    uint64_t total_inserted() const { return inserted_; }

    // Logical index 0 = oldest retained transition.
    const Transition& at(size_t i) const;

    // Uniform with replacement.
    std::vector<Transition> sample(size_t n, Rng& rng) const;

private:
    size_t capacity_;
    size_t next_ = 0;
    uint64_t inserted_ = 0;
    std::vector<Transition> ring_;
};

struct TrainingConfig {
    double gamma = 0.9;
    double learning_rate = 1e-3;
    int batch_size = 32;
    int target_sync_period = 500;     // gradient steps between target syncs
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    uint64_t epsilon_decay_steps = 0; // 0 = half of the estimated total decisions
    int episodes = 300;
    double horizon = 500.0;           // seconds per episode
    uint64_t seed = 1;
    bool double_dqn = false;
    std::vector<int> hidden_layers = {64, 64};
    size_t replay_capacity = 50000;

    void validate() const;
};

// Linear decay from start to end over decay_steps decisions, flat afterwards.
double epsilon_at(uint64_t decision_index, double start, double end, uint64_t decay_steps);

// Expected decision count for one episode (exact for periodic streams).
uint64_t estimate_decisions(const std::vector<TaskStream>& streams, double horizon);

struct EpisodePoint {
    double mean_reward = 0.0;
    double sched_ratio = 0.0;
};

struct TrainResult {
    QNetwork network;
    std::vector<EpisodePoint> curve;
    uint64_t gradient_steps = 0;
};

// Runs `episodes` simulator episodes with an epsilon-greedy behavior policy,
// learning one gradient step per decision once the buffer holds a batch.
// Fully reproducible from the config seed.
TrainResult train(const Topology& topology, const std::vector<TaskStream>& streams,
                  const TrainingConfig& cfg, const LedgerConfig& ledger_cfg,
                  const AttackConfig& attack_cfg, const RewardWeights& weights);

// Checkpoint: magic, layer sizes, seed, config digest, then row-major weights
// and biases as little-endian 64-bit floats. Round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const QNetwork& net, uint64_t seed,
                     const Digest& config_digest);

struct Checkpoint {
    QNetwork network;
    uint64_t seed = 0;
    Digest config_digest{};
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fogsim
