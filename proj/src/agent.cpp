#include "fogsim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fogsim/bytes.hpp"
#include "fogsim/simcore.hpp"

namespace fogsim {

QNetwork QNetwork::init(const std::vector<int>& sizes, uint64_t seed) {
    if (sizes.size() < 2) throw std::invalid_argument("network needs input and output sizes");
    for (int s : sizes) {
        if (s <= 0) throw std::invalid_argument("network layer sizes must be > 0");
    }
    QNetwork net;
    net.sizes = sizes;
    Rng rng(seed);
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer layer;
        layer.in = sizes[l];
        layer.out = sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        layer.w.resize(static_cast<size_t>(layer.in) * layer.out);
        for (auto& w : layer.w) w = rng.uniform(-bound, bound);
        layer.b.assign(static_cast<size_t>(layer.out), 0.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

NetGrads NetGrads::zeros_like(const QNetwork& net) {
    NetGrads g;
    for (const auto& l : net.layers) {
        Layer z;
        z.in = l.in;
        z.out = l.out;
        z.w.assign(l.w.size(), 0.0);
        z.b.assign(l.b.size(), 0.0);
        g.layers.push_back(std::move(z));
    }
    return g;
}

namespace {

// Forward pass keeping pre- and post-activation values for backprop.
struct ForwardCache {
    std::vector<std::vector<double>> activations;  // [0] = input, then per layer
    std::vector<std::vector<double>> pre;          // pre-activation per layer
};

std::vector<double> forward_cached(const QNetwork& net, std::span<const double> state,
                                   ForwardCache* cache) {
    if (static_cast<int>(state.size()) != net.input_size()) {
        throw std::invalid_argument("q_forward: state length does not match the input layer");
    }
    std::vector<double> a(state.begin(), state.end());
    if (cache) cache->activations.push_back(a);
    for (size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        std::vector<double> z(static_cast<size_t>(layer.out));
        for (int o = 0; o < layer.out; ++o) {
            double acc = layer.b[static_cast<size_t>(o)];
            const double* row = layer.w.data() + static_cast<size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) acc += row[i] * a[static_cast<size_t>(i)];
            z[static_cast<size_t>(o)] = acc;
        }
        if (cache) cache->pre.push_back(z);
        const bool hidden = l + 1 < net.layers.size();
        if (hidden) {
            for (auto& v : z) v = v > 0.0 ? v : 0.0;
        }
        a = std::move(z);
        if (cache) cache->activations.push_back(a);
    }
    return a;
}

}  // namespace

std::vector<double> q_forward(const QNetwork& net, std::span<const double> state) {
    return forward_cached(net, state, nullptr);
}

double bellman_target(double reward, double gamma, std::span<const double> next_q_target, bool done) {
    if (done) return reward;
    if (next_q_target.empty()) throw std::invalid_argument("bellman_target: empty next q-values");
    return reward + gamma * *std::max_element(next_q_target.begin(), next_q_target.end());
}

double bellman_target_double(double reward, double gamma, std::span<const double> next_q_target,
                             std::span<const double> next_q_online, bool done) {
    if (done) return reward;
    if (next_q_target.empty() || next_q_target.size() != next_q_online.size()) {
        throw std::invalid_argument("bellman_target_double: mismatched q-value lengths");
    }
    size_t best = 0;
    for (size_t i = 1; i < next_q_online.size(); ++i) {
        if (next_q_online[i] > next_q_online[best]) best = i;
    }
    return reward + gamma * next_q_target[best];
}

std::pair<double, NetGrads> td_loss_and_grads(const QNetwork& online, const QNetwork& target,
                                              std::span<const Transition> batch, double gamma,
                                              bool double_dqn) {
    if (batch.empty()) throw std::invalid_argument("td_loss_and_grads: empty batch");
    NetGrads grads = NetGrads::zeros_like(online);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;

    for (const Transition& t : batch) {
        ForwardCache cache;
        const auto q = forward_cached(online, t.state, &cache);
        if (t.action < 0 || t.action >= static_cast<int>(q.size())) {
            throw std::invalid_argument("td_loss_and_grads: action out of range");
        }

        double target_value;
        if (t.done) {
            target_value = t.reward;
        } else {
            const auto next_q_target = q_forward(target, t.next_state);
            if (double_dqn) {
                const auto next_q_online = q_forward(online, t.next_state);
                target_value = bellman_target_double(t.reward, gamma, next_q_target, next_q_online, false);
            } else {
                target_value = bellman_target(t.reward, gamma, next_q_target, false);
            }
        }

        const double err = q[static_cast<size_t>(t.action)] - target_value;
        loss += err * err * inv_batch;

        // Backward pass; only the taken action's output carries error.
        std::vector<double> delta(q.size(), 0.0);
        delta[static_cast<size_t>(t.action)] = 2.0 * err * inv_batch;

        for (size_t l = online.layers.size(); l-- > 0;) {
            const Layer& layer = online.layers[l];
            Layer& g = grads.layers[l];
            const auto& a_prev = cache.activations[l];
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[static_cast<size_t>(o)];
                if (d == 0.0) continue;
                g.b[static_cast<size_t>(o)] += d;
                double* grow = g.w.data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) grow[i] += d * a_prev[static_cast<size_t>(i)];
            }
            if (l == 0) break;
            std::vector<double> prev_delta(static_cast<size_t>(layer.in), 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[static_cast<size_t>(o)];
                if (d == 0.0) continue;
                const double* row = layer.w.data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) prev_delta[static_cast<size_t>(i)] += d * row[i];
            }
            // Rectifier derivative on the hidden layer below.
            const auto& pre_prev = cache.pre[l - 1];
            for (int i = 0; i < layer.in; ++i) {
                if (pre_prev[static_cast<size_t>(i)] <= 0.0) prev_delta[static_cast<size_t>(i)] = 0.0;
            }
            delta = std::move(prev_delta);
        }
    }
    return {loss, std::move(grads)};
}

void sgd_step(QNetwork& net, const NetGrads& grads, double learning_rate) {
    if (grads.layers.size() != net.layers.size()) {
        throw std::invalid_argument("sgd_step: gradient shape mismatch");
    }
    for (size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        const Layer& g = grads.layers[l];
        if (g.w.size() != layer.w.size() || g.b.size() != layer.b.size()) {
            throw std::invalid_argument("sgd_step: gradient shape mismatch");
        }
        for (size_t i = 0; i < layer.w.size(); ++i) layer.w[i] -= learning_rate * g.w[i];
        for (size_t i = 0; i < layer.b.size(); ++i) layer.b[i] -= learning_rate * g.b[i];
    }
}

int select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
    if (q_values.empty()) throw std::invalid_argument("select_action: no actions");
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("select_action: epsilon in [0, 1]");
    if (epsilon > 0.0 && rng.uniform01() < epsilon) {
        return static_cast<int>(rng.uniform_int(q_values.size()));
    }
    size_t best = 0;
    for (size_t i = 1; i < q_values.size(); ++i) {
        if (q_values[i] > q_values[best]) best = i;
    }
    return static_cast<int>(best);
}

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be > 0");
    ring_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (ring_.size() < capacity_) {
        ring_.push_back(std::move(t));
    } else {
        ring_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
    ++inserted_;
}

const Transition& ReplayBuffer::at(size_t i) const {
    if (i >= ring_.size()) throw std::out_of_range("replay buffer index");
    if (ring_.size() < capacity_) return ring_[i];
    return ring_[(next_ + i) % capacity_];
}

std::vector<Transition> ReplayBuffer::sample(size_t n, Rng& rng) const {
    if (ring_.empty()) throw std::runtime_error("replay buffer is empty");
    std::vector<Transition> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(ring_[rng.uniform_int(ring_.size())]);
    return out;
}

void TrainingConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("training.gamma: must be in [0, 1)");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("training.learning_rate: must be > 0");
    if (batch_size < 1) throw std::invalid_argument("training.batch_size: must be >= 1");
    if (target_sync_period < 1) throw std::invalid_argument("training.target_sync: must be >= 1");
    if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 || epsilon_end > 1.0) {
        throw std::invalid_argument("training.epsilon: must be in [0, 1]");
    }
    if (epsilon_end > epsilon_start) {
        throw std::invalid_argument("training.epsilon_end: must be <= epsilon_start");
    }
    if (episodes < 0) throw std::invalid_argument("training.episodes: must be >= 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("training.horizon: must be > 0");
    for (int h : hidden_layers) {
        if (h < 1) throw std::invalid_argument("training.hidden_layers: sizes must be >= 1");
    }
    if (replay_capacity < static_cast<size_t>(batch_size)) {
        throw std::invalid_argument("training.replay_capacity: must be >= batch_size");
    }
}

double epsilon_at(uint64_t decision_index, double start, double end, uint64_t decay_steps) {
    if (decay_steps == 0 || decision_index >= decay_steps) return end;
    return start + (end - start) * (static_cast<double>(decision_index) / static_cast<double>(decay_steps));
}

uint64_t estimate_decisions(const std::vector<TaskStream>& streams, double horizon) {
    uint64_t total = 0;
    for (const auto& s : streams) {
        total += static_cast<uint64_t>(std::floor(horizon / s.period)) + 1;
    }
    return total;
}

namespace {

// Behavior policy plus learner: epsilon-greedy decisions, one gradient step
// per decision once the buffer holds a batch, target sync every K steps.
class DqnTrainer : public Policy, public DecisionHooks {
public:
    DqnTrainer(QNetwork net, const TrainingConfig& cfg, uint64_t decay_steps)
        : theta_(std::move(net)),
          target_(theta_),
          replay_(cfg.replay_capacity),
          cfg_(cfg),
          decay_steps_(decay_steps),
          batch_rng_(derive_seed(cfg.seed, "batch")) {}

    int decide(const DecisionContext& ctx) override {
        const double eps = epsilon_at(decisions_, cfg_.epsilon_start, cfg_.epsilon_end, decay_steps_);
        ++decisions_;
        return select_action(q_forward(theta_, ctx.state), eps, ctx.rng);
    }

    std::string name() const override { return "dqn"; }

    void on_transition_ready(const Transition& t) override { replay_.push(t); }

    void after_decision() override {
        if (replay_.size() < static_cast<size_t>(cfg_.batch_size)) return;
        const auto batch = replay_.sample(static_cast<size_t>(cfg_.batch_size), batch_rng_);
        auto [loss, grads] = td_loss_and_grads(theta_, target_, batch, cfg_.gamma, cfg_.double_dqn);
        (void)loss;
        sgd_step(theta_, grads, cfg_.learning_rate);
        ++steps_;
        if (steps_ % static_cast<uint64_t>(cfg_.target_sync_period) == 0) target_ = sync_target(theta_);
    }

    QNetwork take_network() { return std::move(theta_); }
    uint64_t gradient_steps() const { return steps_; }

private:
    QNetwork theta_;
    QNetwork target_;
    ReplayBuffer replay_;
    TrainingConfig cfg_;
    uint64_t decay_steps_;
    Rng batch_rng_;
    uint64_t decisions_ = 0;
    uint64_t steps_ = 0;
};

}  // namespace

TrainResult train(const Topology& topology, const std::vector<TaskStream>& streams,
                  const TrainingConfig& cfg, const LedgerConfig& ledger_cfg,
                  const AttackConfig& attack_cfg, const RewardWeights& weights) {
    cfg.validate();

    std::vector<int> sizes;
    sizes.push_back(static_cast<int>(state_length(topology.fog_ids().size())));
    for (int h : cfg.hidden_layers) sizes.push_back(h);
    sizes.push_back(static_cast<int>(topology.action_count()));

    uint64_t decay = cfg.epsilon_decay_steps;
    if (decay == 0) {
        decay = std::max<uint64_t>(
            1, static_cast<uint64_t>(cfg.episodes) * estimate_decisions(streams, cfg.horizon) / 2);
    }

    DqnTrainer trainer(QNetwork::init(sizes, derive_seed(cfg.seed, "init")), cfg, decay);

    TrainResult result;
    result.curve.reserve(static_cast<size_t>(cfg.episodes));
    for (int ep = 0; ep < cfg.episodes; ++ep) {
        const uint64_t episode_seed = derive_seed(cfg.seed, static_cast<uint64_t>(ep));
        const EpisodeTrace trace = run_episode(topology, streams, trainer, ledger_cfg, attack_cfg,
                                               weights, cfg.horizon, episode_seed, &trainer);
        result.curve.push_back(EpisodePoint{trace.metrics.mean_reward, trace.metrics.sched_ratio});
    }
    result.gradient_steps = trainer.gradient_steps();
    result.network = trainer.take_network();
    return result;
}

namespace {
constexpr char kCheckpointMagic[8] = {'F', 'S', 'Q', 'N', '0', '0', '0', '1'};
}

void save_checkpoint(const std::filesystem::path& path, const QNetwork& net, uint64_t seed,
                     const Digest& config_digest) {
    ByteWriter w;
    w.raw(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(kCheckpointMagic), 8));
    w.u32(static_cast<uint32_t>(net.sizes.size()));
    for (int s : net.sizes) w.u32(static_cast<uint32_t>(s));
    w.u64(seed);
    w.raw(std::span<const uint8_t>(config_digest.data(), config_digest.size()));
    for (const auto& layer : net.layers) {
        for (double v : layer.w) w.f64(v);
        for (double v : layer.b) w.f64(v);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
    const auto& bytes = w.bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    ByteReader r(bytes);
    const auto magic = r.take(8);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const uint8_t*>(kCheckpointMagic))) {
        throw std::runtime_error("not a checkpoint file: " + path.string());
    }
    const uint32_t n_sizes = r.u32();
    if (n_sizes < 2 || n_sizes > 64) throw std::runtime_error("checkpoint: bad layer count");
    std::vector<int> sizes;
    for (uint32_t i = 0; i < n_sizes; ++i) sizes.push_back(static_cast<int>(r.u32()));

    Checkpoint ckpt;
    ckpt.seed = r.u64();
    const auto dg = r.take(32);
    std::copy(dg.begin(), dg.end(), ckpt.config_digest.begin());

    ckpt.network.sizes = sizes;
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer layer;
        layer.in = sizes[l];
        layer.out = sizes[l + 1];
        layer.w.resize(static_cast<size_t>(layer.in) * layer.out);
        for (auto& v : layer.w) v = r.f64();
        layer.b.resize(static_cast<size_t>(layer.out));
        for (auto& v : layer.b) v = r.f64();
        ckpt.network.layers.push_back(std::move(layer));
    }
    if (!r.done()) throw std::runtime_error("checkpoint: trailing bytes");
    return ckpt;
}

}  // namespace fogsim
