#pragma once

#include <stdexcept>

#include "fogsim/outcome.hpp"

namespace fogsim {

// Reward shape: completion bonus minus latency, energy, corruption and miss
// penalties. Latency is capped at twice the relative deadline to bound the
// magnitude; energy is normalized by the episode's reference energy.
struct RewardWeights {
    double done = 1.0;
    double latency = 0.5;
    double energy = 0.2;
    double security = 2.0;
    double miss = 1.0;

    void validate() const {
        if (done < 0 || latency < 0 || energy < 0 || security < 0 || miss < 0) {
            throw std::invalid_argument("reward weights must be >= 0");
        }
    }
};

double compute_reward(const Outcome& outcome, double relative_deadline, double energy_ref,
                      const RewardWeights& w);

}  // namespace fogsim
