#include "fogsim/chain_io.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace fogsim {

using nlohmann::json;

void export_chain(const Chain& chain, std::ostream& out) {
    json meta = {{"format", "fogsim-chain"},
                 {"version", 1},
                 {"difficulty", chain.difficulty},
                 {"selection", to_string(chain.selection)},
                 {"max_tx_per_block", chain.max_tx_per_block},
                 {"hash_rate", chain.hash_rate},
                 {"c_gen_block", chain.timing.c_gen_block},
                 {"c_val_block", chain.timing.c_val_block},
                 {"alpha", chain.timing.alpha},
                 {"beta", chain.timing.beta}};
    out << meta.dump() << "\n";

    for (const auto& b : chain.blocks) {
        json txs = json::array();
        for (const auto& r : b.transactions) {
            json t = {{"record_id", r.record_id},
                      {"job_id", r.job_id},
                      {"action", r.action},
                      {"outcome_digest", to_hex(r.outcome_digest)},
                      {"submit_time", r.submit_time},
                      {"record_deadline", r.record_deadline}};
            if (r.confirmed_time) t["confirmed_time"] = *r.confirmed_time;
            txs.push_back(std::move(t));
        }
        json jb = {{"index", b.header.index},
                   {"timestamp", b.header.timestamp},
                   {"prev_hash", to_hex(b.header.prev_hash)},
                   {"merkle_root", to_hex(b.header.merkle_root)},
                   {"nonce", b.header.nonce},
                   {"transactions", std::move(txs)}};
        out << jb.dump() << "\n";
    }
}

Chain import_chain(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("chain file: empty");
    json meta = json::parse(line);
    if (meta.value("format", "") != "fogsim-chain") {
        throw std::runtime_error("chain file: unrecognized format line");
    }

    Chain chain;
    chain.difficulty = meta.at("difficulty").get<int>();
    chain.selection = selection_from_string(meta.at("selection").get<std::string>());
    chain.max_tx_per_block = meta.at("max_tx_per_block").get<int>();
    chain.hash_rate = meta.at("hash_rate").get<double>();
    chain.timing = scale_bounds(meta.at("c_gen_block").get<double>(),
                                meta.at("c_val_block").get<double>(),
                                meta.at("alpha").get<double>(), meta.at("beta").get<double>());

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json jb = json::parse(line);
        Block b;
        b.header.index = jb.at("index").get<uint64_t>();
        b.header.timestamp = jb.at("timestamp").get<double>();
        b.header.prev_hash = digest_from_hex(jb.at("prev_hash").get<std::string>());
        b.header.merkle_root = digest_from_hex(jb.at("merkle_root").get<std::string>());
        b.header.nonce = jb.at("nonce").get<uint64_t>();
        for (const auto& t : jb.at("transactions")) {
            OffloadRecord r;
            r.record_id = t.at("record_id").get<uint64_t>();
            r.job_id = t.at("job_id").get<uint64_t>();
            r.action = t.at("action").get<uint32_t>();
            r.outcome_digest = digest_from_hex(t.at("outcome_digest").get<std::string>());
            r.submit_time = t.at("submit_time").get<double>();
            r.record_deadline = t.at("record_deadline").get<double>();
            if (t.contains("confirmed_time")) r.confirmed_time = t["confirmed_time"].get<double>();
            b.transactions.push_back(std::move(r));
        }
        chain.blocks.push_back(std::move(b));
    }
    return chain;
}

void export_honest_digests(const HonestOracle& oracle, std::ostream& out) {
    for (const auto& [record_id, info] : oracle) {
        json j = {{"record_id", record_id},
                  {"digest", to_hex(info.honest_digest)},
                  {"node", info.node_id},
                  {"corrupted", info.corrupted}};
        out << j.dump() << "\n";
    }
}

HonestOracle import_honest_digests(std::istream& in) {
    HonestOracle oracle;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        HonestRecordInfo info;
        info.honest_digest = digest_from_hex(j.at("digest").get<std::string>());
        info.node_id = j.at("node").get<std::string>();
        info.corrupted = j.at("corrupted").get<bool>();
        oracle[j.at("record_id").get<uint64_t>()] = std::move(info);
    }
    return oracle;
}

}  // namespace fogsim
