#include "fogsim/outcome.hpp"

#include "fogsim/bytes.hpp"

namespace fogsim {

std::vector<uint8_t> encode_outcome(const Outcome& o) {
    ByteWriter w;
    w.u64(o.job_id);
    w.u8(static_cast<uint8_t>(o.target.kind));
    w.str(o.target.node_id);
    w.f64(o.completion_time);
    w.f64(o.latency);
    w.f64(o.energy);
    w.u8(o.deadline_met ? 1 : 0);
    w.u8(o.corrupted ? 1 : 0);
    return w.take();
}

Digest outcome_digest(const Outcome& o) {
    const auto bytes = encode_outcome(o);
    return sha256(std::span<const uint8_t>(bytes));
}

}  // namespace fogsim
