#include "tunechain/chain.hpp"

#include <json.hpp>

#include "tunechain/chunkstore.hpp"
#include "tunechain/errors.hpp"
#include "tunechain/sha256.hpp"

namespace tunechain {

Bytes canonical_header_bytes(const ParentBlockHeader& header) {
    Bytes out;
    out.reserve(88);
    append_u32_be(out, header.version);
    append_bytes(out, header.prev_hash.bytes);
    append_bytes(out, header.merkle_root.bytes);
    append_u64_be(out, header.timestamp);
    append_u32_be(out, header.target_difficulty);
    append_u64_be(out, header.nonce);
    return out;
}

ParentBlockHeader header_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 88) throw InvalidInput("header encoding must be 88 bytes");
    ParentBlockHeader header;
    header.version = read_u32_be(bytes.subspan(0, 4));
    header.prev_hash = Hash32::from_span(bytes.subspan(4, 32));
    header.merkle_root = Hash32::from_span(bytes.subspan(36, 32));
    header.timestamp = read_u64_be(bytes.subspan(68, 8));
    header.target_difficulty = read_u32_be(bytes.subspan(76, 4));
    header.nonce = read_u64_be(bytes.subspan(80, 8));
    return header;
}

Hash32 block_hash(const ParentBlockHeader& header) {
    return sha256d(canonical_header_bytes(header));
}

Hash32 tx_merkle_root(const std::vector<std::string>& transactions) {
    if (transactions.empty()) return Hash32{};
    std::vector<Hash32> leaves;
    leaves.reserve(transactions.size());
    for (const std::string& tx : transactions) leaves.push_back(sha256(tx));
    return merkle_root(leaves);
}

std::uint64_t block_serialized_size(const ParentBlock& block) {
    std::uint64_t size = 88 + 8 + Address::size();
    for (const std::string& tx : block.transactions) size += 4 + tx.size();
    return size;
}

ParentBlock make_block(const Blockchain& chain, std::vector<std::string> transactions,
                       const Address& validator, std::int64_t now) {
    ParentBlock block;
    block.header.version = 1;
    block.header.prev_hash = chain.tip_hash;
    block.header.merkle_root = tx_merkle_root(transactions);
    block.header.timestamp = static_cast<std::uint64_t>(now);
    block.header.target_difficulty = 0;
    block.header.nonce = 0;
    block.tx_count = transactions.size();
    block.transactions = std::move(transactions);
    block.validator = validator;
    block.block_size = block_serialized_size(block);
    return block;
}

const ParentBlock& append_block(Blockchain& chain, std::vector<std::string> transactions,
                                const Address& validator, std::int64_t now) {
    adopt_block(chain, make_block(chain, std::move(transactions), validator, now));
    return chain.blocks.back();
}

void adopt_block(Blockchain& chain, ParentBlock block) {
    chain.tip_hash = block_hash(block.header);
    chain.blocks.push_back(std::move(block));
}

namespace {

ChainValidity invalid_at(std::size_t height, std::string reason) {
    return ChainValidity{false, height, std::move(reason)};
}

ChainValidity check_block(const ParentBlock& block, const Hash32& expected_prev,
                          std::size_t height) {
    if (block.header.prev_hash != expected_prev) return invalid_at(height, "prev hash mismatch");
    if (block.header.merkle_root != tx_merkle_root(block.transactions))
        return invalid_at(height, "merkle root mismatch");
    if (block.tx_count != block.transactions.size())
        return invalid_at(height, "tx count mismatch");
    if (block.block_size != block_serialized_size(block))
        return invalid_at(height, "block size mismatch");
    return ChainValidity{};
}

}  // namespace

ChainValidity validate_chain(const Blockchain& chain) {
    Hash32 expected_prev;  // genesis links to all zeros
    for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
        ChainValidity check = check_block(chain.blocks[i], expected_prev, i);
        if (!check.ok) return check;
        expected_prev = block_hash(chain.blocks[i].header);
    }
    if (chain.tip_hash != expected_prev)
        return invalid_at(chain.blocks.empty() ? 0 : chain.blocks.size() - 1, "tip hash mismatch");
    return ChainValidity{};
}

ChainValidity validate_candidate(const Blockchain& chain, const ParentBlock& block) {
    return check_block(block, chain.tip_hash, chain.height());
}

std::string block_to_json(const ParentBlock& block) {
    nlohmann::json txs = nlohmann::json::array();
    for (const std::string& tx : block.transactions) txs.push_back(nlohmann::json::parse(tx));
    return nlohmann::json{
        {"block_size", block.block_size},
        {"header",
         {{"merkle_root", block.header.merkle_root.hex()},
          {"nonce", block.header.nonce},
          {"prev_hash", block.header.prev_hash.hex()},
          {"target_difficulty", block.header.target_difficulty},
          {"timestamp", block.header.timestamp},
          {"version", block.header.version}}},
        {"transactions", std::move(txs)},
        {"tx_count", block.tx_count},
        {"validator", block.validator.hex()},
    }.dump();
}

ParentBlock block_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    ParentBlock block;
    block.block_size = doc.at("block_size").get<std::uint64_t>();
    const auto& header = doc.at("header");
    block.header.merkle_root = Hash32::parse_hex(header.at("merkle_root").get<std::string>());
    block.header.nonce = header.at("nonce").get<std::uint64_t>();
    block.header.prev_hash = Hash32::parse_hex(header.at("prev_hash").get<std::string>());
    block.header.target_difficulty = header.at("target_difficulty").get<std::uint32_t>();
    block.header.timestamp = header.at("timestamp").get<std::uint64_t>();
    block.header.version = header.at("version").get<std::uint32_t>();
    for (const auto& tx : doc.at("transactions")) block.transactions.push_back(tx.dump());
    block.tx_count = doc.at("tx_count").get<std::uint64_t>();
    block.validator = Address::parse_hex(doc.at("validator").get<std::string>());
    return block;
}

std::uint64_t rng_word(std::uint64_t seed, std::uint64_t counter) {
    Bytes src;
    append_bytes(src, as_bytes("tunechain.rng"));
    append_u64_be(src, seed);
    append_u64_be(src, counter);
    Hash32 digest = sha256(src);
    return read_u64_be(std::span<const std::uint8_t>(digest.bytes.data(), 8));
}

Address select_validator(std::span<const Validator> validators, std::uint64_t randomness) {
    if (validators.empty()) throw InvalidInput("select_validator: no validators");
    std::uint64_t total = 0;
    for (const Validator& v : validators) {
        if (v.stake == 0) throw InvalidInput("select_validator: stake must be >= 1");
        total += v.stake;
    }
    // Scale the 64-bit draw into [0, total); selection chance is stake-linear.
    std::uint64_t point =
        static_cast<std::uint64_t>(static_cast<unsigned __int128>(randomness) * total >> 64);
    std::uint64_t cumulative = 0;
    for (const Validator& v : validators) {
        cumulative += v.stake;
        if (point < cumulative) return v.node_id;
    }
    return validators.back().node_id;
}

// --- side chain ---------------------------------------------------------

namespace {

std::string violation_core_json(const ViolationTx& tx) {
    return nlohmann::json{{"nid", tx.nid.hex()},
                          {"tov", tx.tov},
                          {"uid", tx.uid.hex()},
                          {"vt", tx.vt}}
        .dump();
}

}  // namespace

Hash32 violation_signature(const ViolationTx& tx, std::span<const std::uint8_t> node_secret) {
    Bytes src;
    append_bytes(src, tx.nid.bytes);
    append_bytes(src, as_bytes(violation_core_json(tx)));
    append_bytes(src, node_secret);
    return sha256(src);
}

std::string violation_to_json(const ViolationTx& tx) {
    nlohmann::json doc = nlohmann::json::parse(violation_core_json(tx));
    doc["ns"] = tx.ns.hex();
    return doc.dump();
}

ViolationTx violation_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    ViolationTx tx;
    tx.tov = doc.at("tov").get<std::int64_t>();
    tx.uid = Address::parse_hex(doc.at("uid").get<std::string>());
    tx.vt = doc.at("vt").get<int>();
    tx.nid = Address::parse_hex(doc.at("nid").get<std::string>());
    tx.ns = Hash32::parse_hex(doc.at("ns").get<std::string>());
    return tx;
}

Hash32 side_merkle_root(const std::vector<ViolationTx>& violations) {
    if (violations.empty()) return Hash32{};
    std::vector<Hash32> leaves;
    leaves.reserve(violations.size());
    for (const ViolationTx& v : violations) leaves.push_back(sha256(violation_to_json(v)));
    return merkle_root(leaves);
}

std::uint64_t side_serialized_size(const SideBlock& block) {
    std::uint64_t size = 88 + 8 + 4 + block.id.size() + 8;
    for (const ViolationTx& v : block.violations) size += 4 + violation_to_json(v).size();
    return size;
}

const SideBlock& record_violation(SideChain& chain, ViolationTx violation,
                                  const Hash32& parent_hash, std::int64_t now) {
    SideBlock block;
    block.id = parent_hash.hex().substr(0, 8) + "-" + std::to_string(chain.blocks.size());
    block.header.version = 1;
    block.header.prev_hash = chain.tip_hash;
    block.header.timestamp = static_cast<std::uint64_t>(now);
    block.violations.push_back(std::move(violation));
    block.header.merkle_root = side_merkle_root(block.violations);
    block.tx_counter = block.violations.size();
    block.chain_time = now;
    block.block_size = side_serialized_size(block);
    adopt_side_block(chain, std::move(block));
    return chain.blocks.back();
}

void adopt_side_block(SideChain& chain, SideBlock block) {
    chain.tip_hash = block_hash(block.header);
    chain.blocks.push_back(std::move(block));
}

std::string side_block_to_json(const SideBlock& block) {
    nlohmann::json violations = nlohmann::json::array();
    for (const ViolationTx& v : block.violations)
        violations.push_back(nlohmann::json::parse(violation_to_json(v)));
    return nlohmann::json{
        {"block_size", block.block_size},
        {"chain_time", block.chain_time},
        {"header",
         {{"merkle_root", block.header.merkle_root.hex()},
          {"nonce", block.header.nonce},
          {"prev_hash", block.header.prev_hash.hex()},
          {"target_difficulty", block.header.target_difficulty},
          {"timestamp", block.header.timestamp},
          {"version", block.header.version}}},
        {"id", block.id},
        {"tx_counter", block.tx_counter},
        {"violations", std::move(violations)},
    }.dump();
}

SideBlock side_block_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    SideBlock block;
    block.block_size = doc.at("block_size").get<std::uint64_t>();
    block.chain_time = doc.at("chain_time").get<std::int64_t>();
    const auto& header = doc.at("header");
    block.header.merkle_root = Hash32::parse_hex(header.at("merkle_root").get<std::string>());
    block.header.nonce = header.at("nonce").get<std::uint64_t>();
    block.header.prev_hash = Hash32::parse_hex(header.at("prev_hash").get<std::string>());
    block.header.target_difficulty = header.at("target_difficulty").get<std::uint32_t>();
    block.header.timestamp = header.at("timestamp").get<std::uint64_t>();
    block.header.version = header.at("version").get<std::uint32_t>();
    block.id = doc.at("id").get<std::string>();
    block.tx_counter = doc.at("tx_counter").get<std::uint64_t>();
    for (const auto& v : doc.at("violations")) block.violations.push_back(violation_from_json(v.dump()));
    return block;
}

}  // namespace tunechain
