#include "fogsim/workload.hpp"

#include <cmath>
#include <stdexcept>

#include "fogsim/rng.hpp"

namespace fogsim {

std::string to_string(ArrivalKind k) {
    return k == ArrivalKind::Periodic ? "periodic" : "poisson";
}

ArrivalKind arrival_from_string(const std::string& s) {
    if (s == "periodic") return ArrivalKind::Periodic;
    if (s == "poisson") return ArrivalKind::Poisson;
    throw std::invalid_argument("unknown arrival kind: " + s);
}

std::string to_string(JobStatus s) {
    switch (s) {
        case JobStatus::Pending: return "pending";
        case JobStatus::Offloaded: return "offloaded";
        case JobStatus::Completed: return "completed";
        case JobStatus::Missed: return "missed";
        case JobStatus::Corrupted: return "corrupted";
    }
    return "unknown";
}

bool status_transition_allowed(JobStatus from, JobStatus to) {
    if (from == JobStatus::Pending) return to == JobStatus::Offloaded;
    if (from == JobStatus::Offloaded) {
        return to == JobStatus::Completed || to == JobStatus::Missed || to == JobStatus::Corrupted;
    }
    return false;  // terminal states
}

void validate_stream(const TaskStream& s) {
    if (!(s.period > 0)) throw std::invalid_argument("stream " + s.id + ": period must be > 0");
    if (!(s.deadline > 0)) throw std::invalid_argument("stream " + s.id + ": deadline must be > 0");
    if (!(s.size > 0)) throw std::invalid_argument("stream " + s.id + ": size must be > 0");
}

std::vector<TaskInstance> generate_jobs(const TaskStream& stream, double horizon, uint64_t rng_seed) {
    validate_stream(stream);
    if (!(horizon > 0)) throw std::invalid_argument("generate_jobs: horizon must be > 0");

    std::vector<TaskInstance> jobs;
    auto push = [&](double release) {
        jobs.push_back(TaskInstance{
            .job_id = jobs.size(),
            .stream_id = stream.id,
            .release_time = release,
            .absolute_deadline = release + stream.deadline,
            .size = stream.size,
            .status = JobStatus::Pending,
        });
    };

    if (stream.arrival == ArrivalKind::Periodic) {
        const uint64_t count = static_cast<uint64_t>(std::floor(horizon / stream.period)) + 1;
        for (uint64_t k = 0; k < count; ++k) push(static_cast<double>(k) * stream.period);
    } else {
        Rng rng(rng_seed);
        double t = rng.exponential(stream.period);
        while (t <= horizon) {
            push(t);
            t += rng.exponential(stream.period);
        }
    }
    return jobs;
}

SlotParams slot_parameters(const TaskStream& stream, const NodeSpec& node, const LinkSpec& link) {
    validate_stream(stream);
    if (!(node.capacity > 0)) throw std::invalid_argument("slot_parameters: node capacity must be > 0");
    if (!(link.bandwidth > 0)) throw std::invalid_argument("slot_parameters: link bandwidth must be > 0");
    SlotParams p;
    p.exec_time = stream.size / node.capacity;
    p.tx_time = stream.size / link.bandwidth + link.propagation;
    p.total_budget = p.tx_time + p.exec_time;
    return p;
}

SlotParams slot_parameters(const TaskStream& stream, const NodeSpec& node) {
    validate_stream(stream);
    if (!(node.capacity > 0)) throw std::invalid_argument("slot_parameters: node capacity must be > 0");
    SlotParams p;
    p.exec_time = stream.size / node.capacity;
    p.tx_time = 0.0;
    p.total_budget = p.exec_time;
    return p;
}

}  // namespace fogsim
