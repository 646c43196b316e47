#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fogsim/topology.hpp"

namespace fogsim {

enum class ArrivalKind { Periodic, Poisson };

std::string to_string(ArrivalKind k);
ArrivalKind arrival_from_string(const std::string& s);

// User-level task stream: mean inter-arrival T, relative deadline D, size S.
struct TaskStream {
    std::string id;
    double period = 0.0;    // T_i, seconds
    double deadline = 0.0;  // D_i, seconds, relative
    double size = 0.0;      // S_i, work-units
    std::string source;     // originating IoT device
    ArrivalKind arrival = ArrivalKind::Periodic;
};

enum class JobStatus { Pending, Offloaded, Completed, Missed, Corrupted };

std::string to_string(JobStatus s);

// Forward transitions only: Pending -> Offloaded -> {Completed, Missed, Corrupted}.
bool status_transition_allowed(JobStatus from, JobStatus to);

struct TaskInstance {
    uint64_t job_id = 0;  // index within the stream's release sequence
    std::string stream_id;
    double release_time = 0.0;
    double absolute_deadline = 0.0;
    double size = 0.0;
    JobStatus status = JobStatus::Pending;
};

// Node- and link-specific execution budget for one job.
struct SlotParams {
    double exec_time = 0.0;    // C_i on the target node, seconds
    double tx_time = 0.0;      // transfer over the chosen link, seconds
    double total_budget = 0.0; // tx_time + exec_time
};

void validate_stream(const TaskStream& s);

// Released jobs on [0, horizon], sorted by release time. Periodic streams
// release at 0, T, 2T, ...; Poisson streams draw exponential inter-arrivals
// with mean T from the seeded generator (bit-identical for equal seeds).
std::vector<TaskInstance> generate_jobs(const TaskStream& stream, double horizon, uint64_t rng_seed);

// Slot-level translation: C_i = S_i / capacity, tx = S_i / bandwidth + propagation.
SlotParams slot_parameters(const TaskStream& stream, const NodeSpec& node, const LinkSpec& link);
// Local execution on the source device: no transfer.
SlotParams slot_parameters(const TaskStream& stream, const NodeSpec& node);

}  // namespace fogsim
