#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tunechain/bytes.hpp"

namespace tunechain {

struct ParentBlockHeader {
    std::uint32_t version = 1;
    Hash32 prev_hash;
    Hash32 merkle_root;
    std::uint64_t timestamp = 0;
    std::uint32_t target_difficulty = 0;  // carried, never enforced: PoS needs no work target
    std::uint64_t nonce = 0;

    auto operator<=>(const ParentBlockHeader&) const = default;
};

// version(4) || prev_hash(32) || merkle_root(32) || timestamp(8) ||
// target_difficulty(4) || nonce(8), all integers big-endian. 88 bytes.
Bytes canonical_header_bytes(const ParentBlockHeader& header);
ParentBlockHeader header_from_bytes(std::span<const std::uint8_t> bytes);

// SHA-256 applied twice over the canonical header bytes.
Hash32 block_hash(const ParentBlockHeader& header);

struct ParentBlock {
    std::uint64_t block_size = 0;
    ParentBlockHeader header;
    std::uint64_t tx_count = 0;
    std::vector<std::string> transactions;  // canonical JSON records
    Address validator;
};

// Merkle root over single-SHA-256 of each transaction encoding; zero hash
// for an empty block.
Hash32 tx_merkle_root(const std::vector<std::string>& transactions);

// Size of the canonical binary serialization:
// header(88) || tx_count(8) || per tx: length(4) || bytes || validator(20).
std::uint64_t block_serialized_size(const ParentBlock& block);

struct Blockchain {
    std::vector<ParentBlock> blocks;
    Hash32 tip_hash;  // zeros while empty

    std::size_t height() const { return blocks.size(); }
};

// Builds the next block: prev_hash = current tip (zeros for genesis),
// timestamp = now, nonce 0.
ParentBlock make_block(const Blockchain& chain, std::vector<std::string> transactions,
                       const Address& validator, std::int64_t now);

// make_block + append; returns the appended block.
const ParentBlock& append_block(Blockchain& chain, std::vector<std::string> transactions,
                                const Address& validator, std::int64_t now);

// Appends an externally minted block, updating the tip. The caller validates.
void adopt_block(Blockchain& chain, ParentBlock block);

struct ChainValidity {
    bool ok = true;
    std::size_t first_bad_height = 0;
    std::string reason;
};

// Checks linkage, merkle root, tx_count and block_size of every block, and
// the stored tip hash; reports the first failing height.
ChainValidity validate_chain(const Blockchain& chain);

// Structural check of a candidate for the current tip position.
ChainValidity validate_candidate(const Blockchain& chain, const ParentBlock& block);

std::string block_to_json(const ParentBlock& block);
ParentBlock block_from_json(const std::string& text);

// --- proof of stake -----------------------------------------------------

struct Validator {
    Address node_id;
    std::uint64_t stake = 0;
};

// Deterministic 64-bit draw: first 8 bytes of SHA-256 over a fixed tag, the
// seed and the counter. Counter-based so a reloaded chain keeps drawing the
// same sequence (the counter is the chain height).
std::uint64_t rng_word(std::uint64_t seed, std::uint64_t counter);

// Samples one validator with probability stake / total stake.
Address select_validator(std::span<const Validator> validators, std::uint64_t randomness);

// --- side chain ---------------------------------------------------------

enum ViolationType : int {
    kDuplicateUpload = 1,
    kUnauthorizedDownload = 2,
};

struct ViolationTx {
    std::int64_t tov = 0;  // timestamp of violation
    Address uid;           // offending user
    int vt = 0;            // violation type
    Address nid;           // recording node
    Hash32 ns;             // keyed hash tag over the record
};

// ns = SHA-256(nid || canonical record without ns || node_secret).
Hash32 violation_signature(const ViolationTx& tx, std::span<const std::uint8_t> node_secret);

std::string violation_to_json(const ViolationTx& tx);
ViolationTx violation_from_json(const std::string& text);

struct SideBlock {
    std::string id;  // "<first-8-hex-of-parent-hash>-<side-index>"
    std::uint64_t block_size = 0;
    ParentBlockHeader header;  // same six fields as a parent header
    std::uint64_t tx_counter = 0;
    std::vector<ViolationTx> violations;
    std::int64_t chain_time = 0;  // network arrival time
};

struct SideChain {
    std::vector<SideBlock> blocks;
    Hash32 tip_hash;
};

Hash32 side_merkle_root(const std::vector<ViolationTx>& violations);
std::uint64_t side_serialized_size(const SideBlock& block);

const SideBlock& record_violation(SideChain& chain, ViolationTx violation,
                                  const Hash32& parent_hash, std::int64_t now);
void adopt_side_block(SideChain& chain, SideBlock block);

std::string side_block_to_json(const SideBlock& block);
SideBlock side_block_from_json(const std::string& text);

}  // namespace tunechain
