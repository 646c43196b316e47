#include <doctest.h>

#include <stdexcept>

#include "fogsim/attacks.hpp"
#include "fogsim/simcore.hpp"
#include "support/fixtures.hpp"

using namespace fogsim;

TEST_SUITE_BEGIN("attacks");

TEST_CASE("mark_compromised picks round(fraction * N) fog nodes") {
    const auto topo = fixtures::topology(1, 4);
    CHECK(mark_compromised(topo, 0.0, 1).empty());
    CHECK(mark_compromised(topo, 1.0, 1).size() == 4);
    CHECK(mark_compromised(topo, 0.5, 1).size() == 2);
    CHECK(mark_compromised(topo, 0.25, 1).size() == 1);

    const auto a = mark_compromised(topo, 0.5, 9);
    const auto b = mark_compromised(topo, 0.5, 9);
    CHECK(a == b);

    for (const auto& id : mark_compromised(topo, 1.0, 3)) {
        CHECK(topo.node(id).tier == Tier::Fog);  // never iot or cloud
    }
    CHECK_THROWS_AS(mark_compromised(topo, 1.5, 1), std::invalid_argument);
}

TEST_CASE("maybe_tamper honest and boundary behavior") {
    Rng rng(4);
    AttackConfig cfg{0.5, 1.0, 1};
    Outcome o;
    o.job_id = 3;
    o.completion_time = 5.0;
    o.latency = 5.0;
    o.deadline_met = true;

    NodeSpec honest_fog{"fog0", Tier::Fog, 10, 1, 0, false};
    const Outcome same = maybe_tamper(o, honest_fog, cfg, rng);
    CHECK_FALSE(same.corrupted);
    CHECK(same.deadline_met);
    CHECK(outcome_digest(same) == outcome_digest(o));

    NodeSpec compromised{"fog1", Tier::Fog, 10, 1, 0, true};
    const Outcome bad = maybe_tamper(o, compromised, cfg, rng);
    CHECK(bad.corrupted);  // tamper_probability = 1
    CHECK_FALSE(bad.deadline_met);
    CHECK(outcome_digest(bad) != outcome_digest(o));  // digest diverges

    NodeSpec cloud{"cloud", Tier::Cloud, 50, 1, 0, true};
    CHECK_FALSE(maybe_tamper(o, cloud, cfg, rng).corrupted);  // cloud is trusted
}

TEST_CASE("tamper rate matches the configured probability") {
    Rng rng(8);
    AttackConfig cfg{1.0, 0.25, 1};
    NodeSpec node{"fog0", Tier::Fog, 10, 1, 0, true};
    Outcome o;
    o.deadline_met = true;
    int corrupted = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        if (maybe_tamper(o, node, cfg, rng).corrupted) ++corrupted;
    }
    // 3 sigma around 2500
    CHECK(corrupted >= 2370);
    CHECK(corrupted <= 2630);
}

TEST_CASE("audit counts exactly the corrupted records") {
    LedgerConfig lcfg;
    lcfg.difficulty = 4;
    Chain chain = make_chain(lcfg);
    HonestOracle oracle;

    std::vector<OffloadRecord> pending;
    for (uint64_t i = 0; i < 10; ++i) {
        Outcome honest;
        honest.job_id = i;
        honest.completion_time = 1.0 + static_cast<double>(i);
        honest.deadline_met = true;
        Outcome delivered = honest;
        const bool corrupt = (i % 3 == 0);  // 4 of 10
        if (corrupt) {
            delivered.corrupted = true;
            delivered.deadline_met = false;
        }
        OffloadRecord r;
        r.record_id = i;
        r.job_id = i;
        r.action = 1;
        r.outcome_digest = outcome_digest(delivered);
        r.submit_time = static_cast<double>(i);
        r.record_deadline = static_cast<double>(i) + 10.0;
        pending.push_back(std::move(r));
        oracle[i] = HonestRecordInfo{outcome_digest(honest), i % 2 ? "fog0" : "fog1", corrupt};
    }
    double now = 0.0;
    while (!pending.empty()) now += mine_block(chain, pending, now).duration;

    const SecurityReport report = audit(chain, oracle);
    CHECK(report.incidents == 4);
    CHECK(report.detected == 4);
    uint64_t per_node_total = 0;
    for (const auto& [node, count] : report.per_node_incidents) per_node_total += count;
    CHECK(per_node_total == 4);

    // Tampered chains are refused.
    chain.blocks[1].transactions[0].outcome_digest[5] ^= 0x10;
    CHECK_THROWS_AS(audit(chain, oracle), std::runtime_error);
}

TEST_CASE("audit with no compromise reports zero") {
    LedgerConfig lcfg;
    lcfg.difficulty = 2;
    Chain chain = make_chain(lcfg);
    HonestOracle oracle;
    std::vector<OffloadRecord> pending;
    for (uint64_t i = 0; i < 5; ++i) {
        Outcome o;
        o.job_id = i;
        OffloadRecord r;
        r.record_id = i;
        r.job_id = i;
        r.outcome_digest = outcome_digest(o);
        r.submit_time = static_cast<double>(i);
        r.record_deadline = 100.0;
        pending.push_back(std::move(r));
        oracle[i] = HonestRecordInfo{outcome_digest(o), "fog0", false};
    }
    double now = 0.0;
    while (!pending.empty()) now += mine_block(chain, pending, now).duration;
    const SecurityReport report = audit(chain, oracle);
    CHECK(report.incidents == 0);
    CHECK(report.detected == 0);
    CHECK(report.per_node_incidents.empty());
}

TEST_CASE("zero-attack runs match runs without an attack section") {
    const auto topo = fixtures::topology(2, 3);
    const std::vector<TaskStream> streams = {fixtures::stream("a", 5, 6, 4, "iot0"),
                                             fixtures::stream("b", 4, 5, 6, "iot1")};
    RandomPolicy p1, p2;
    const AttackConfig zero{0.0, 0.7, 5};  // nonzero tamper probability but nobody compromised
    const AttackConfig absent{};
    const auto a =
        run_episode(topo, streams, p1, LedgerConfig{}, zero, RewardWeights{}, 40.0, 11);
    const auto b =
        run_episode(topo, streams, p2, LedgerConfig{}, absent, RewardWeights{}, 40.0, 11);
    CHECK(fixtures::trace_fingerprint(a) == fixtures::trace_fingerprint(b));
    CHECK(a.metrics.incidents == 0);
    CHECK(a.metrics.detected == 0);
}

TEST_CASE("detection equals incidents for every seed") {
    const auto topo = fixtures::topology(2, 4);
    const std::vector<TaskStream> streams = {fixtures::stream("a", 5, 6, 4, "iot0"),
                                             fixtures::stream("b", 4, 5, 6, "iot1")};
    const AttackConfig attack{0.5, 0.5, 21};
    for (uint64_t seed = 0; seed < 5; ++seed) {
        RandomPolicy p;
        const auto trace =
            run_episode(topo, streams, p, LedgerConfig{}, attack, RewardWeights{}, 60.0, seed);
        CHECK(trace.metrics.detected == trace.metrics.incidents);
        CHECK(trace.metrics.corrupted == trace.metrics.incidents);
    }
}

TEST_SUITE_END();
