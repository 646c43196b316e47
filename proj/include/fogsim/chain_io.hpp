#pragma once

#include <iosfwd>

#include "fogsim/attacks.hpp"
#include "fogsim/ledger.hpp"

namespace fogsim {

// Newline-delimited chain export for external audit. The first line carries
// the chain parameters, then one JSON record per block with hex-encoded
// hashes and the full transaction list.
void export_chain(const Chain& chain, std::ostream& out);
Chain import_chain(std::istream& in);

// Sidecar with the engine's honest per-record digests, one JSON line per
// record, enabling incident detection on an exported chain.
void export_honest_digests(const HonestOracle& oracle, std::ostream& out);
HonestOracle import_honest_digests(std::istream& in);

}  // namespace fogsim
