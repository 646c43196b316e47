#pragma once

#include <cstdint>
#include <vector>

#include "fogsim/sha256.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

// Result of one offloading decision, as delivered by the executing node.
struct Outcome {
    uint64_t job_id = 0;
    OffloadTarget target;
    double completion_time = 0.0;  // seconds
    double latency = 0.0;          // completion - release
    double energy = 0.0;           // joules attributed to this job
    bool deadline_met = false;     // completion <= absolute deadline and not corrupted
    bool corrupted = false;
};

// Canonical byte layout (all little-endian):
//   u64 job_id | u8 target kind | str target node id | f64 completion_time
//   | f64 latency | f64 energy | u8 deadline_met | u8 corrupted
// where str is a u32 length prefix followed by the raw bytes. The digest of
// this encoding is what offload records carry; cross-run digests are
// bit-exact because the layout has no padding or host-order fields.
std::vector<uint8_t> encode_outcome(const Outcome& o);

Digest outcome_digest(const Outcome& o);

}  // namespace fogsim
