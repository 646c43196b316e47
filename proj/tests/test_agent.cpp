#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fogsim/agent.hpp"
#include "support/fixtures.hpp"

using namespace fogsim;

namespace {

// Transpose-order matrix multiply, kept separate from the implementation path.
std::vector<double> oracle_forward(const QNetwork& net, const std::vector<double>& x) {
    std::vector<double> a = x;
    for (size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        std::vector<double> z(layer.b.begin(), layer.b.end());
        for (int i = 0; i < layer.in; ++i) {
            for (int o = 0; o < layer.out; ++o) {
                z[static_cast<size_t>(o)] +=
                    layer.w[static_cast<size_t>(o) * layer.in + i] * a[static_cast<size_t>(i)];
            }
        }
        if (l + 1 < net.layers.size()) {
            for (auto& v : z) v = std::max(0.0, v);
        }
        a = std::move(z);
    }
    return a;
}

Transition make_transition(Rng& rng, int state_len, int actions) {
    Transition t;
    for (int i = 0; i < state_len; ++i) t.state.push_back(rng.uniform01());
    for (int i = 0; i < state_len; ++i) t.next_state.push_back(rng.uniform01());
    t.action = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(actions)));
    t.reward = rng.uniform(-2.0, 2.0);
    t.done = rng.bernoulli(0.25);
    return t;
}

double max_fd_relative_error(QNetwork net, const QNetwork& target,
                             const std::vector<Transition>& batch, double gamma) {
    const auto [loss, grads] = td_loss_and_grads(net, target, batch, gamma);
    (void)loss;
    const double h = 1e-5;
    double worst = 0.0;
    auto loss_at = [&]() { return td_loss_and_grads(net, target, batch, gamma).first; };
    for (size_t l = 0; l < net.layers.size(); ++l) {
        auto check_param = [&](double& param, double analytic) {
            const double keep = param;
            param = keep + h;
            const double up = loss_at();
            param = keep - h;
            const double down = loss_at();
            param = keep;
            const double fd = (up - down) / (2.0 * h);
            const double rel = std::abs(fd - analytic) /
                               std::max({std::abs(fd), std::abs(analytic), 1e-6});
            worst = std::max(worst, rel);
        };
        for (size_t i = 0; i < net.layers[l].w.size(); ++i) {
            check_param(net.layers[l].w[i], grads.layers[l].w[i]);
        }
        for (size_t i = 0; i < net.layers[l].b.size(); ++i) {
            check_param(net.layers[l].b[i], grads.layers[l].b[i]);
        }
    }
    return worst;
}

}  // namespace

TEST_SUITE_BEGIN("agent");

TEST_CASE("forward pass on degenerate networks") {
    QNetwork zero = QNetwork::init({2, 3, 2}, 1);
    for (auto& l : zero.layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    const auto q = q_forward(zero, std::vector<double>{0.4, 0.6});
    CHECK(q == std::vector<double>{0.0, 0.0});

    QNetwork identity = QNetwork::init({2, 2}, 1);
    identity.layers[0].w = {1.0, 0.0, 0.0, 1.0};
    identity.layers[0].b = {0.0, 0.0};
    const auto out = q_forward(identity, std::vector<double>{0.3, 0.7});
    CHECK(out[0] == 0.3);
    CHECK(out[1] == 0.7);

    CHECK_THROWS_AS(q_forward(identity, std::vector<double>{0.3}), std::invalid_argument);
}

TEST_CASE("forward pass matches an independent matrix-multiply oracle") {
    const QNetwork net = QNetwork::init({5, 16, 8, 4}, 77);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x;
        for (int i = 0; i < 5; ++i) x.push_back(rng.uniform(-1.0, 1.0));
        const auto got = q_forward(net, x);
        const auto want = oracle_forward(net, x);
        REQUIRE(got.size() == want.size());
        for (size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("bellman targets") {
    const std::vector<double> next = {2.0, 1.0};
    CHECK(bellman_target(1.0, 0.0, next, false) == 1.0);  // myopic
    CHECK(bellman_target(1.0, 0.9, next, false) == doctest::Approx(2.8));
    CHECK(bellman_target(-3.7, 0.9, next, true) == -3.7);  // terminal: no bootstrap

    const std::vector<double> online = {0.0, 10.0};
    const std::vector<double> target = {3.0, 4.0};
    CHECK(bellman_target_double(1.0, 0.5, target, online, false) == doctest::Approx(3.0));
    CHECK(bellman_target_double(1.0, 0.5, target, online, true) == 1.0);
}

TEST_CASE("td loss is zero at the fixed point") {
    const QNetwork net = QNetwork::init({3, 8, 2}, 9);
    std::vector<Transition> batch;
    Rng rng(2);
    for (int i = 0; i < 6; ++i) {
        Transition t = make_transition(rng, 3, 2);
        t.done = false;
        // gamma = 0 makes the target equal the reward; set it to the prediction.
        t.reward = q_forward(net, t.state)[static_cast<size_t>(t.action)];
        batch.push_back(std::move(t));
    }
    const auto [loss, grads] = td_loss_and_grads(net, net, batch, 0.0);
    CHECK(loss == 0.0);
    for (const auto& l : grads.layers) {
        for (double g : l.w) CHECK(g == 0.0);
        for (double g : l.b) CHECK(g == 0.0);
    }
}

TEST_CASE("single-sample linear network matches the closed form") {
    QNetwork net = QNetwork::init({2, 2}, 1);
    net.layers[0].w = {0.5, -0.25, 0.1, 0.2};
    net.layers[0].b = {0.1, -0.1};
    Transition t;
    t.state = {0.4, 0.8};
    t.next_state = {0.0, 0.0};
    t.action = 0;
    t.reward = 1.2;
    t.done = true;

    const std::vector<Transition> batch = {t};
    const auto [loss, grads] = td_loss_and_grads(net, net, batch, 0.9);
    // prediction = 0.5*0.4 - 0.25*0.8 + 0.1 = 0.1; loss = (0.1 - 1.2)^2
    CHECK(loss == doctest::Approx(1.21));
    CHECK(grads.layers[0].w[0] == doctest::Approx(-0.88));   // 2*(pred-target)*s0
    CHECK(grads.layers[0].w[1] == doctest::Approx(-1.76));
    CHECK(grads.layers[0].b[0] == doctest::Approx(-2.2));
    CHECK(grads.layers[0].w[2] == 0.0);  // untaken action carries no error
    CHECK(grads.layers[0].w[3] == 0.0);
    CHECK(grads.layers[0].b[1] == 0.0);
}

TEST_CASE("backprop agrees with central finite differences") {
    const QNetwork net = QNetwork::init({3, 8, 2}, 123);
    const QNetwork target = QNetwork::init({3, 8, 2}, 321);
    Rng rng(11);
    std::vector<Transition> batch;
    for (int i = 0; i < 4; ++i) batch.push_back(make_transition(rng, 3, 2));
    CHECK(max_fd_relative_error(net, target, batch, 0.9) < 1e-4);
}

TEST_CASE("double-dqn target uses the online argmax under the target valuation") {
    // Two linear nets with hand-set outputs: online ranks action 1 highest,
    // the target network values it at 4.0.
    QNetwork online = QNetwork::init({2, 2}, 1);
    online.layers[0].w = {0.0, 0.0, 0.0, 0.0};
    online.layers[0].b = {0.0, 10.0};
    QNetwork target = QNetwork::init({2, 2}, 2);
    target.layers[0].w = {0.0, 0.0, 0.0, 0.0};
    target.layers[0].b = {3.0, 4.0};

    Transition t;
    t.state = {1.0, 0.0};
    t.next_state = {0.0, 1.0};
    t.action = 0;
    t.reward = 1.0;
    t.done = false;

    const std::vector<Transition> batch = {t};
    // Plain target bootstraps from max(target q) = 4; double-dqn picks the
    // online argmax (action 1), also rated 4 here, so craft a divergence:
    target.layers[0].b = {9.0, 4.0};  // plain max = 9, double = 4
    const auto plain = td_loss_and_grads(online, target, batch, 0.5, false);
    const auto doubled = td_loss_and_grads(online, target, batch, 0.5, true);
    // prediction for action 0 is 0; targets: 1 + 0.5*9 = 5.5 vs 1 + 0.5*4 = 3.
    CHECK(plain.first == doctest::Approx(5.5 * 5.5));
    CHECK(doubled.first == doctest::Approx(3.0 * 3.0));
}

TEST_CASE("sgd step arithmetic") {
    QNetwork net = QNetwork::init({1, 1}, 1);
    net.layers[0].w = {1.0};
    net.layers[0].b = {0.5};
    NetGrads g = NetGrads::zeros_like(net);
    g.layers[0].w = {2.0};
    g.layers[0].b = {0.0};

    QNetwork frozen = net;
    sgd_step(frozen, g, 0.0);
    CHECK(frozen.layers[0].w[0] == 1.0);  // zero learning rate

    sgd_step(net, g, 0.1);
    CHECK(net.layers[0].w[0] == doctest::Approx(0.8));
    CHECK(net.layers[0].b[0] == 0.5);

    NetGrads zero = NetGrads::zeros_like(net);
    QNetwork before = net;
    sgd_step(net, zero, 0.1);
    CHECK(net.layers[0].w[0] == before.layers[0].w[0]);
}

TEST_CASE("action selection") {
    Rng rng(1);
    CHECK(select_action(std::vector<double>{0.1, 0.9, 0.3}, 0.0, rng) == 1);
    CHECK(select_action(std::vector<double>{0.5, 0.5}, 0.0, rng) == 0);  // tie: lowest index

    // Greedy choice is invariant to a constant shift.
    Rng r2(1);
    const std::vector<double> q = {0.2, -0.7, 0.9, 0.1};
    const std::vector<double> shifted = {5.2, 4.3, 5.9, 5.1};
    CHECK(select_action(q, 0.0, r2) == select_action(shifted, 0.0, r2));

    CHECK_THROWS_AS(select_action(q, 1.5, rng), std::invalid_argument);
}

TEST_CASE("fully random exploration is uniform") {
    Rng rng(99);
    const std::vector<double> q = {1.0, 0.0, -1.0};
    std::array<int, 3> counts{};
    for (int i = 0; i < 30000; ++i) {
        counts[static_cast<size_t>(select_action(q, 1.0, rng))]++;
    }
    for (int c : counts) {
        CHECK(c >= 9755);  // 3 sigma around 10000
        CHECK(c <= 10245);
    }
}

TEST_CASE("target sync copies without aliasing and is idempotent") {
    QNetwork net = QNetwork::init({2, 4, 2}, 5);
    QNetwork target = sync_target(net);
    const std::vector<double> s = {0.3, 0.9};
    CHECK(q_forward(target, s) == q_forward(net, s));

    NetGrads g = NetGrads::zeros_like(net);
    g.layers.back().b[0] = 1.0;  // output bias: unconditionally visible
    sgd_step(net, g, 0.5);
    CHECK(q_forward(target, s) != q_forward(net, s));  // no aliasing

    QNetwork twice = sync_target(sync_target(net));
    CHECK(q_forward(twice, s) == q_forward(net, s));
}

TEST_CASE("replay buffer evicts strictly oldest-first") {
    ReplayBuffer buf(5);
    for (int i = 0; i < 8; ++i) {
        Transition t;
        t.state = {static_cast<double>(i)};
        t.next_state = {0.0};
        t.reward = static_cast<double>(i);
        buf.push(std::move(t));
    }
    CHECK(buf.size() == 5);
    CHECK(buf.total_inserted() == 8);
    for (size_t i = 0; i < 5; ++i) {
        CHECK(buf.at(i).reward == static_cast<double>(i + 3));  // last 5 retained
    }
    CHECK_THROWS_AS(buf.at(5), std::out_of_range);
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    const QNetwork net = QNetwork::init({4, 8, 3}, 2024);
    const Digest digest = sha256(std::string_view("config"));
    const auto path = std::filesystem::temp_directory_path() / "fogsim_ckpt_test.bin";
    save_checkpoint(path, net, 42, digest);
    const Checkpoint ckpt = load_checkpoint(path);
    std::filesystem::remove(path);

    CHECK(ckpt.seed == 42);
    CHECK(ckpt.config_digest == digest);
    REQUIRE(ckpt.network.sizes == net.sizes);
    for (size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(ckpt.network.layers[l].w == net.layers[l].w);
        CHECK(ckpt.network.layers[l].b == net.layers[l].b);
    }
}

TEST_CASE("epsilon schedule") {
    CHECK(epsilon_at(0, 1.0, 0.05, 100) == 1.0);
    CHECK(epsilon_at(50, 1.0, 0.05, 100) == doctest::Approx(0.525));
    CHECK(epsilon_at(100, 1.0, 0.05, 100) == 0.05);
    CHECK(epsilon_at(5000, 1.0, 0.05, 100) == 0.05);
    CHECK(epsilon_at(7, 1.0, 0.05, 0) == 0.05);
}

TEST_CASE("decision estimate for periodic streams") {
    const std::vector<TaskStream> streams = {fixtures::stream("a", 10, 12, 1),
                                             fixtures::stream("b", 5, 6, 1)};
    CHECK(estimate_decisions(streams, 25.0) == 3 + 6);
}

TEST_CASE("training config validation") {
    TrainingConfig bad;
    bad.gamma = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = TrainingConfig{};
    bad.epsilon_end = 2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = TrainingConfig{};
    bad.replay_capacity = 4;
    bad.batch_size = 32;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("zero-episode training returns the initialization") {
    const auto topo = fixtures::topology(1, 1);
    const std::vector<TaskStream> streams = {fixtures::stream("s", 5, 6, 4)};
    TrainingConfig cfg;
    cfg.episodes = 0;
    cfg.horizon = 20.0;
    cfg.seed = 7;
    cfg.hidden_layers = {8};
    const TrainResult r = train(topo, streams, cfg, LedgerConfig{}, AttackConfig{}, RewardWeights{});
    CHECK(r.curve.empty());
    CHECK(r.gradient_steps == 0);

    const QNetwork fresh = QNetwork::init(r.network.sizes, derive_seed(7, "init"));
    for (size_t l = 0; l < fresh.layers.size(); ++l) {
        CHECK(r.network.layers[l].w == fresh.layers[l].w);
    }
}

TEST_CASE("training is reproducible from the seed") {
    const auto topo = fixtures::topology(1, 2);
    const std::vector<TaskStream> streams = {fixtures::stream("s", 5, 6, 4),
                                             fixtures::stream("t", 4, 5, 6)};
    TrainingConfig cfg;
    cfg.episodes = 3;
    cfg.horizon = 30.0;
    cfg.seed = 99;
    cfg.hidden_layers = {8};
    cfg.batch_size = 8;
    cfg.replay_capacity = 256;
    AttackConfig attack{0.5, 0.5, 3};

    const TrainResult a = train(topo, streams, cfg, LedgerConfig{}, attack, RewardWeights{});
    const TrainResult b = train(topo, streams, cfg, LedgerConfig{}, attack, RewardWeights{});
    REQUIRE(a.curve.size() == b.curve.size());
    for (size_t i = 0; i < a.curve.size(); ++i) {
        CHECK(a.curve[i].mean_reward == b.curve[i].mean_reward);  // bit-identical
        CHECK(a.curve[i].sched_ratio == b.curve[i].sched_ratio);
    }
    for (size_t l = 0; l < a.network.layers.size(); ++l) {
        CHECK(a.network.layers[l].w == b.network.layers[l].w);
        CHECK(a.network.layers[l].b == b.network.layers[l].b);
    }
    CHECK(a.gradient_steps == b.gradient_steps);
    CHECK(a.gradient_steps > 0);
}

TEST_SUITE_END();
