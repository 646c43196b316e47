#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace fogsim {

// Headline metrics for one episode / result row.
struct RunMetrics {
    uint64_t scheduled = 0;
    uint64_t completed = 0;
    uint64_t missed = 0;
    uint64_t corrupted = 0;  // terminal Corrupted count (== incidents)
    double sched_ratio = 0.0;
    double mean_latency = 0.0;
    double p95_latency = 0.0;
    double total_energy = 0.0;
    uint64_t incidents = 0;
    uint64_t detected = 0;
    double mean_confirm_latency = 0.0;
    double mean_reward = 0.0;
    uint64_t admission_violations = 0;
    std::map<std::string, uint64_t> per_node_incidents;
};

// Completed / scheduled. Throws std::invalid_argument when scheduled == 0:
// the ratio is undefined there, never silently 0 or 1.
double schedulability_ratio(uint64_t completed, uint64_t scheduled);

}  // namespace fogsim
