#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fogsim/schedulability.hpp"
#include "fogsim/sha256.hpp"

namespace fogsim {

enum class TxSelection { Fifo, Edf };

std::string to_string(TxSelection s);
TxSelection selection_from_string(const std::string& s);

// One offloading decision/outcome awaiting (or holding) ledger confirmation.
struct OffloadRecord {
    uint64_t record_id = 0;
    uint64_t job_id = 0;
    uint32_t action = 0;
    Digest outcome_digest{};      // hash of the canonical outcome encoding
    double submit_time = 0.0;
    double record_deadline = 0.0; // the job's absolute deadline
    std::optional<double> confirmed_time;
};

struct BlockHeader {
    uint64_t index = 0;
    double timestamp = 0.0;
    Digest prev_hash{};
    Digest merkle_root{};
    uint64_t nonce = 0;
};

struct Block {
    BlockHeader header;
    std::vector<OffloadRecord> transactions;
};

struct LedgerConfig {
    bool enabled = true;
    int difficulty = 8;           // required leading zero bits of the header hash
    TxSelection selection = TxSelection::Edf;
    int max_tx_per_block = 8;
    double hash_rate = 1e6;       // simulated nonce attempts per second
    double c_gen_block = 1.0;     // blockchain generation/validation constants
    double c_val_block = 0.5;
    double alpha = 1.0;           // fog scaling factors
    double beta = 1.0;
};

struct Chain {
    std::vector<Block> blocks;
    int difficulty = 8;
    TxSelection selection = TxSelection::Edf;
    int max_tx_per_block = 8;
    TimingBounds timing;
    double hash_rate = 1e6;
};

// Canonical encodings. Record bytes exclude confirmed_time (assigned after
// inclusion); both encodings are fixed-layout and bijective, so the
// bit-flip sweep can mutate and re-verify them.
std::vector<uint8_t> encode_record(const OffloadRecord& r);
OffloadRecord decode_record(std::span<const uint8_t> bytes);
Digest record_leaf_digest(const OffloadRecord& r);

std::vector<uint8_t> encode_header(const BlockHeader& h);
Digest header_hash(const BlockHeader& h);

// Merkle root over ordered leaf digests; odd levels duplicate the last node;
// a single leaf is its own root; the empty list hashes to sha256("").
Digest merkle_root(std::span<const Digest> leaves);

// Picks up to max_tx records. Fifo: by (submit_time, record_id).
// Edf: by (record_deadline, submit_time, record_id). Output order = selection order.
std::vector<OffloadRecord> select_transactions(const std::vector<OffloadRecord>& pending,
                                               TxSelection policy, int max_tx);

// Validates and builds the chain with a mined genesis block (prev hash all
// zeros, timestamp 0, no transactions).
Chain make_chain(const LedgerConfig& cfg);

struct MineResult {
    uint64_t block_index = 0;
    double duration = 0.0;        // max(c_gen_fog, attempts / hash_rate)
    uint64_t attempts = 0;        // nonce search length, starting from 0
    double confirmed_time = 0.0;  // now + duration + c_val_fog
};

// Mines one block at simulated time `now` from the pending set; the selected
// records are removed from `pending` and stored in the block with their
// confirmed_time set. Pending must be non-empty.
MineResult mine_block(Chain& chain, std::vector<OffloadRecord>& pending, double now);

struct VerifyResult {
    bool ok = true;
    uint64_t bad_index = 0;
    enum class Reason { None, IndexMismatch, GenesisPrevHash, LinkMismatch, MerkleMismatch, DifficultyNotMet };
    Reason reason = Reason::None;
};

std::string to_string(VerifyResult::Reason r);

// Checks genesis prev-hash, every link, every merkle root, every difficulty
// bound, and that stored indices match positions. Reports the first bad block.
VerifyResult verify_chain(const Chain& chain);

// confirmed_time - submit_time; throws std::runtime_error if unconfirmed.
double confirmation_latency(const OffloadRecord& r);

}  // namespace fogsim
