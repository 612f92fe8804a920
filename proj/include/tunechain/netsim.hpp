#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tunechain/chain.hpp"
#include "tunechain/chunkstore.hpp"
#include "tunechain/contract.hpp"
#include "tunechain/identity.hpp"

namespace tunechain {

// 2020-02-20 00:00:00 UTC; every simulation clock starts here.
constexpr std::int64_t kGenesisTime = 1582156800;

constexpr std::size_t kChunkReplication = 3;

using Distance160 = FixedBytes<20>;

// Bitwise XOR of two addresses, read as a 160-bit big-endian unsigned value.
Distance160 xor_distance(const Address& a, const Address& b);

// Consensus-replicated state of one node.
struct ReplicaState {
    ContractState ledger;
    IdentityState identity;
    Blockchain chain;
    SideChain side_chain;
    std::map<Hash32, FileManifest> manifests;
};

// Applies a canonical transaction record; throws on any invalid transition,
// leaving the state unchanged.
void apply_tx(ReplicaState& state, const std::string& tx_json);

Hash32 replica_digest(const ReplicaState& state);

struct SimNode {
    Address node_id;
    std::uint64_t stake = 1;
    ChunkStore store;
    ReplicaState replica;
    std::array<std::uint8_t, 32> node_secret{};
};

struct StoreResult {
    bool copyright_violation = false;
    Hash32 manifest_root;  // on violation, the already-registered file's root
    Fingerprint fingerprint;
    std::int64_t uploaded_at = 0;
};

struct DownloadReceipt {
    Bytes bytes;
    DownloadGrant grant;
    std::int64_t price_cents = 0;
    std::uint64_t downloads = 0;
};

struct RoundResult {
    ParentBlock block;
    std::vector<std::pair<std::string, std::string>> rejected;  // tx, reason
};

// Deterministic in-process network. A single driver advances the simulation
// step by step; nothing here runs concurrently.
class SimNetwork {
public:
    struct Config {
        std::size_t node_count = 4;
        std::uint64_t seed = 42;
        std::int64_t price_cents = 137;
        std::vector<std::uint64_t> stakes;  // default: 1 per node
        std::int64_t genesis_time = kGenesisTime;
    };

    SimNetwork();
    explicit SimNetwork(Config config);

    // --- identity ---
    Address register_user(const std::string& email, const std::string& password);
    AuthResult login(const std::string& email, const std::string& password) const;

    // --- upload / download workflows ---
    StoreResult store_music(const Address& uploader, std::span<const std::uint8_t> file_bytes,
                            const std::string& author, const std::string& title);
    DownloadReceipt download_file(const Address& requester, const Hash32& manifest_root);
    // Chunk fetch without payment; refused and recorded unless access is
    // already granted.
    Bytes direct_fetch(const Address& requester, const Hash32& manifest_root);

    // --- access management (owner calls) ---
    void grant(const Address& owner, const Address& addr, const Hash32& hash);
    void revoke(const Address& owner, const Address& addr, const Hash32& hash);

    // --- consensus ---
    RoundResult consensus_round();
    void broadcast_block(const ParentBlock& block);
    // Queues a raw transaction without the staged pre-check (fault injection).
    void inject_tx(std::string tx_json);

    // --- DHT ---
    std::vector<Address> locate_chunk(const Hash32& chunk_hash) const;

    // --- reload support: adopt externally persisted data without hooks ---
    void adopt_logged_block(const ParentBlock& block);
    void adopt_logged_side_block(const SideBlock& block);
    void seed_chunk(Chunk chunk);

    // --- inspection ---
    const ReplicaState& canonical() const { return nodes_.front().replica; }
    const std::map<Hash32, FileManifest>& manifests() const { return canonical().manifests; }
    SimNode& node(std::size_t i) { return nodes_.at(i); }
    const SimNode& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t pending_count() const { return pending_.size(); }
    std::int64_t now() const { return clock_; }
    void advance_clock(std::int64_t to);
    std::int64_t price_cents() const { return config_.price_cents; }
    std::uint64_t seed() const { return config_.seed; }
    bool replicas_consistent() const;

    // Persistence hooks, fired when new data is committed.
    std::function<void(const ParentBlock&)> on_block;
    std::function<void(const SideBlock&)> on_side_block;
    std::function<void(const Chunk&)> on_chunk;
    std::function<void(const FileManifest&)> on_manifest;

private:
    std::vector<Validator> validator_view() const;
    SimNode& nearest_node(const Address& to);
    void record_violation_everywhere(const Address& offender, int violation_type);
    Bytes fetch_and_reassemble(const FileManifest& manifest);
    void require_registered(const Address& addr) const;
    const FileManifest& staged_manifest(const Hash32& root) const;

    Config config_;
    std::vector<SimNode> nodes_;
    std::int64_t clock_;
    std::vector<std::string> pending_;
    ReplicaState staged_;  // canonical state with pending transactions applied
};

}  // namespace tunechain
