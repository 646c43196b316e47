#include "fogsim/policies.hpp"

#include <stdexcept>

namespace fogsim {

int decide_random(int action_count, Rng& rng) {
    if (action_count < 1) throw std::invalid_argument("decide_random: action_count must be >= 1");
    return static_cast<int>(rng.uniform_int(static_cast<uint64_t>(action_count)));
}

int decide_round_robin(uint64_t counter, int action_count) {
    if (action_count < 1) throw std::invalid_argument("decide_round_robin: action_count must be >= 1");
    return static_cast<int>(counter % static_cast<uint64_t>(action_count));
}

int decide_greedy(std::span<const TargetEstimate> estimates) {
    if (estimates.empty()) throw std::invalid_argument("decide_greedy: no targets");
    int best = 0;
    double best_est = estimates[0].tx_time + estimates[0].backlog_seconds + estimates[0].exec_time;
    for (size_t i = 1; i < estimates.size(); ++i) {
        const double est = estimates[i].tx_time + estimates[i].backlog_seconds + estimates[i].exec_time;
        if (est < best_est) {
            best = static_cast<int>(i);
            best_est = est;
        }
    }
    return best;
}

std::unique_ptr<Policy> make_baseline_policy(const std::string& name) {
    if (name == "random") return std::make_unique<RandomPolicy>();
    if (name == "round_robin") return std::make_unique<RoundRobinPolicy>();
    if (name == "greedy") return std::make_unique<GreedyPolicy>();
    if (name == "local_only") return std::make_unique<LocalOnlyPolicy>();
    if (name == "cloud_only") return std::make_unique<CloudOnlyPolicy>();
    throw std::invalid_argument("unknown policy: " + name);
}

}  // namespace fogsim
