#include "fogsim/reward.hpp"

#include <algorithm>

namespace fogsim {

double compute_reward(const Outcome& outcome, double relative_deadline, double energy_ref,
                      const RewardWeights& w) {
    w.validate();
    const double lat_norm =
        relative_deadline > 0 ? std::min(outcome.latency / relative_deadline, 2.0) : 0.0;
    const double en_norm = energy_ref > 0 ? outcome.energy / energy_ref : 0.0;
    double r = 0.0;
    if (outcome.deadline_met) r += w.done;
    r -= w.latency * lat_norm;
    r -= w.energy * en_norm;
    if (outcome.corrupted) r -= w.security;
    if (!outcome.deadline_met) r -= w.miss;
    return r;
}

}  // namespace fogsim
