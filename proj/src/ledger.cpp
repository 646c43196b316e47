#include "fogsim/ledger.hpp"

#include <algorithm>
#include <stdexcept>

#include "fogsim/bytes.hpp"

namespace fogsim {

std::string to_string(TxSelection s) { return s == TxSelection::Fifo ? "fifo" : "edf"; }

TxSelection selection_from_string(const std::string& s) {
    if (s == "fifo") return TxSelection::Fifo;
    if (s == "edf") return TxSelection::Edf;
    throw std::invalid_argument("unknown transaction selection: " + s);
}

std::vector<uint8_t> encode_record(const OffloadRecord& r) {
    ByteWriter w;
    w.u64(r.record_id);
    w.u64(r.job_id);
    w.u32(r.action);
    w.raw(std::span<const uint8_t>(r.outcome_digest.data(), r.outcome_digest.size()));
    w.f64(r.submit_time);
    w.f64(r.record_deadline);
    return w.take();
}

OffloadRecord decode_record(std::span<const uint8_t> bytes) {
    ByteReader rd(bytes);
    OffloadRecord r;
    r.record_id = rd.u64();
    r.job_id = rd.u64();
    r.action = rd.u32();
    auto dg = rd.take(32);
    std::copy(dg.begin(), dg.end(), r.outcome_digest.begin());
    r.submit_time = rd.f64();
    r.record_deadline = rd.f64();
    if (!rd.done()) throw std::runtime_error("decode_record: trailing bytes");
    return r;
}

Digest record_leaf_digest(const OffloadRecord& r) {
    const auto bytes = encode_record(r);
    return sha256(std::span<const uint8_t>(bytes));
}

std::vector<uint8_t> encode_header(const BlockHeader& h) {
    ByteWriter w;
    w.u64(h.index);
    w.f64(h.timestamp);
    w.raw(std::span<const uint8_t>(h.prev_hash.data(), h.prev_hash.size()));
    w.raw(std::span<const uint8_t>(h.merkle_root.data(), h.merkle_root.size()));
    w.u64(h.nonce);
    return w.take();
}

Digest header_hash(const BlockHeader& h) {
    const auto bytes = encode_header(h);
    return sha256(std::span<const uint8_t>(bytes));
}

Digest merkle_root(std::span<const Digest> leaves) {
    if (leaves.empty()) return sha256(std::string_view{});
    std::vector<Digest> level(leaves.begin(), leaves.end());
    while (level.size() > 1) {
        if (level.size() % 2 == 1) level.push_back(level.back());
        std::vector<Digest> next;
        next.reserve(level.size() / 2);
        for (size_t i = 0; i < level.size(); i += 2) {
            uint8_t pair[64];
            std::copy(level[i].begin(), level[i].end(), pair);
            std::copy(level[i + 1].begin(), level[i + 1].end(), pair + 32);
            next.push_back(sha256(std::span<const uint8_t>(pair, 64)));
        }
        level = std::move(next);
    }
    return level[0];
}

std::vector<OffloadRecord> select_transactions(const std::vector<OffloadRecord>& pending,
                                               TxSelection policy, int max_tx) {
    if (max_tx <= 0) throw std::invalid_argument("select_transactions: max_tx must be > 0");
    std::vector<OffloadRecord> sorted = pending;
    if (policy == TxSelection::Fifo) {
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return std::tie(a.submit_time, a.record_id) < std::tie(b.submit_time, b.record_id);
        });
    } else {
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return std::tie(a.record_deadline, a.submit_time, a.record_id) <
                   std::tie(b.record_deadline, b.submit_time, b.record_id);
        });
    }
    if (sorted.size() > static_cast<size_t>(max_tx)) sorted.resize(static_cast<size_t>(max_tx));
    return sorted;
}

namespace {

// Nonce search from 0 upward; returns attempts = winning nonce + 1.
uint64_t mine_header(BlockHeader& h, int difficulty) {
    h.nonce = 0;
    while (leading_zero_bits(header_hash(h)) < difficulty) ++h.nonce;
    return h.nonce + 1;
}

}  // namespace

Chain make_chain(const LedgerConfig& cfg) {
    if (cfg.difficulty < 0 || cfg.difficulty > 256) {
        throw std::invalid_argument("ledger: difficulty must be in [0, 256]");
    }
    if (cfg.max_tx_per_block <= 0) throw std::invalid_argument("ledger: max_tx_per_block must be > 0");
    if (!(cfg.hash_rate > 0)) throw std::invalid_argument("ledger: hash_rate must be > 0");

    Chain c;
    c.difficulty = cfg.difficulty;
    c.selection = cfg.selection;
    c.max_tx_per_block = cfg.max_tx_per_block;
    c.timing = scale_bounds(cfg.c_gen_block, cfg.c_val_block, cfg.alpha, cfg.beta);
    c.hash_rate = cfg.hash_rate;

    Block genesis;
    genesis.header.index = 0;
    genesis.header.timestamp = 0.0;
    genesis.header.prev_hash.fill(0);
    genesis.header.merkle_root = merkle_root({});
    mine_header(genesis.header, c.difficulty);
    c.blocks.push_back(std::move(genesis));
    return c;
}

MineResult mine_block(Chain& chain, std::vector<OffloadRecord>& pending, double now) {
    if (pending.empty()) throw std::invalid_argument("mine_block: pending set is empty");

    auto selected = select_transactions(pending, chain.selection, chain.max_tx_per_block);

    // Remove the selected records from pending by id.
    for (const auto& s : selected) {
        auto it = std::find_if(pending.begin(), pending.end(),
                               [&](const auto& p) { return p.record_id == s.record_id; });
        pending.erase(it);
    }

    Block b;
    b.header.index = chain.blocks.size();
    b.header.timestamp = now;
    b.header.prev_hash = header_hash(chain.blocks.back().header);
    std::vector<Digest> leaves;
    leaves.reserve(selected.size());
    for (const auto& r : selected) leaves.push_back(record_leaf_digest(r));
    b.header.merkle_root = merkle_root(leaves);
    const uint64_t attempts = mine_header(b.header, chain.difficulty);

    MineResult res;
    res.block_index = b.header.index;
    res.attempts = attempts;
    res.duration = std::max(chain.timing.c_gen_fog, static_cast<double>(attempts) / chain.hash_rate);
    res.confirmed_time = now + res.duration + chain.timing.c_val_fog;

    for (auto& r : selected) r.confirmed_time = res.confirmed_time;
    b.transactions = std::move(selected);
    chain.blocks.push_back(std::move(b));
    return res;
}

std::string to_string(VerifyResult::Reason r) {
    switch (r) {
        case VerifyResult::Reason::None: return "ok";
        case VerifyResult::Reason::IndexMismatch: return "index mismatch";
        case VerifyResult::Reason::GenesisPrevHash: return "genesis prev-hash not zero";
        case VerifyResult::Reason::LinkMismatch: return "link mismatch";
        case VerifyResult::Reason::MerkleMismatch: return "merkle mismatch";
        case VerifyResult::Reason::DifficultyNotMet: return "difficulty not met";
    }
    return "unknown";
}

VerifyResult verify_chain(const Chain& chain) {
    auto bad = [](uint64_t index, VerifyResult::Reason why) {
        return VerifyResult{.ok = false, .bad_index = index, .reason = why};
    };

    for (size_t k = 0; k < chain.blocks.size(); ++k) {
        const Block& b = chain.blocks[k];
        if (b.header.index != k) return bad(k, VerifyResult::Reason::IndexMismatch);
        if (k == 0) {
            const Digest zero{};
            if (b.header.prev_hash != zero) return bad(k, VerifyResult::Reason::GenesisPrevHash);
        } else if (b.header.prev_hash != header_hash(chain.blocks[k - 1].header)) {
            return bad(k, VerifyResult::Reason::LinkMismatch);
        }
        std::vector<Digest> leaves;
        leaves.reserve(b.transactions.size());
        for (const auto& r : b.transactions) leaves.push_back(record_leaf_digest(r));
        if (b.header.merkle_root != merkle_root(leaves)) {
            return bad(k, VerifyResult::Reason::MerkleMismatch);
        }
        if (leading_zero_bits(header_hash(b.header)) < chain.difficulty) {
            return bad(k, VerifyResult::Reason::DifficultyNotMet);
        }
    }
    return VerifyResult{};
}

double confirmation_latency(const OffloadRecord& r) {
    if (!r.confirmed_time) throw std::runtime_error("confirmation_latency: record not confirmed");
    return *r.confirmed_time - r.submit_time;
}

}  // namespace fogsim
