#include "tunechain/netsim.hpp"

#include <algorithm>

#include <json.hpp>

#include "tunechain/errors.hpp"
#include "tunechain/fingerprint.hpp"
#include "tunechain/sha256.hpp"

namespace tunechain {

Distance160 xor_distance(const Address& a, const Address& b) {
    Distance160 out;
    for (std::size_t i = 0; i < Address::size(); ++i) out.bytes[i] = a.bytes[i] ^ b.bytes[i];
    return out;
}

void apply_tx(ReplicaState& state, const std::string& tx_json) try {
    nlohmann::json tx = nlohmann::json::parse(tx_json);
    const std::string kind = tx.at("kind").get<std::string>();
    const Address caller = Address::parse_hex(tx.at("caller").get<std::string>());
    const std::int64_t timestamp = tx.at("timestamp").get<std::int64_t>();

    if (kind == "register") {
        Hash32 cred_hash = Hash32::parse_hex(tx.at("hash").get<std::string>());
        Address addr = Address::parse_hex(tx.at("addr").get<std::string>());
        if (state.identity.registered.count(cred_hash)) throw Revert("already registered");
        if (addr != derive_address(cred_hash)) throw Revert("address does not match credential");
        state.identity.insert(cred_hash, addr);
        return;
    }

    // Every other kind is a contract transaction from a registered user.
    if (!state.identity.is_registered(caller)) throw Revert("unregistered caller");
    TxContext ctx{caller, timestamp};
    const Hash32 hash = Hash32::parse_hex(tx.at("hash").get<std::string>());

    if (kind == "add_block") {
        FileManifest manifest;
        manifest.root = hash;
        for (const auto& c : tx.at("chunks"))
            manifest.chunk_hashes.push_back(Hash32::parse_hex(c.get<std::string>()));
        manifest.file_size = tx.at("file_size").get<std::uint64_t>();
        manifest.author = tx.at("author").get<std::string>();
        manifest.title = tx.at("title").get<std::string>();
        manifest.date = timestamp;
        if (manifest.chunk_hashes.empty() || merkle_root(manifest.chunk_hashes) != manifest.root)
            throw Revert("manifest root mismatch");
        add_block(state.ledger, ctx, hash, Fingerprint{tx.at("fingerprint").get<std::string>()},
                  manifest.author, manifest.title, timestamp, tx.at("cents").get<std::int64_t>());
        state.manifests.emplace(hash, std::move(manifest));
    } else if (kind == "grant") {
        grant_access(state.ledger, ctx, Address::parse_hex(tx.at("addr").get<std::string>()), hash);
    } else if (kind == "revoke") {
        remove_access(state.ledger, ctx, Address::parse_hex(tx.at("addr").get<std::string>()), hash);
    } else if (kind == "pay") {
        auto it = state.ledger.file_mapping.find(hash);
        if (it != state.ledger.file_mapping.end() &&
            tx.at("cents").get<std::int64_t>() != it->second.price_cents)
            throw Revert("price mismatch");
        pay_and_download(state.ledger, ctx, hash);
    } else {
        throw Revert("unknown transaction kind");
    }
} catch (const nlohmann::json::exception&) {
    // Field accesses all happen before any mutation, so rejecting here keeps
    // the transition atomic.
    throw Revert("malformed transaction");
}

Hash32 replica_digest(const ReplicaState& state) {
    Sha256 digest;
    digest.update(serialize_state(state.ledger));
    digest.update(serialize_identity(state.identity));
    for (const auto& [root, manifest] : state.manifests) digest.update(manifest_to_json(manifest));
    digest.update(state.chain.tip_hash.bytes);
    Bytes counters;
    append_u64_be(counters, state.chain.height());
    append_u64_be(counters, state.side_chain.blocks.size());
    digest.update(counters);
    digest.update(state.side_chain.tip_hash.bytes);
    return digest.finish();
}

namespace {

Address derive_node_id(std::uint64_t seed, std::uint32_t index) {
    Bytes src;
    append_bytes(src, as_bytes("tunechain.node"));
    append_u64_be(src, seed);
    append_u32_be(src, index);
    Hash32 digest = sha256(src);
    return Address::from_span(std::span<const std::uint8_t>(digest.bytes.data(), Address::size()));
}

std::array<std::uint8_t, 32> derive_node_secret(std::uint64_t seed, std::uint32_t index) {
    Bytes src;
    append_bytes(src, as_bytes("tunechain.secret"));
    append_u64_be(src, seed);
    append_u32_be(src, index);
    return sha256(src).bytes;
}

}  // namespace

SimNetwork::SimNetwork() : SimNetwork(Config{}) {}

SimNetwork::SimNetwork(Config config) : config_(std::move(config)), clock_(config_.genesis_time) {
    if (config_.node_count == 0) throw InvalidInput("network needs at least one node");
    if (!config_.stakes.empty() && config_.stakes.size() != config_.node_count)
        throw InvalidInput("stakes must match node count");
    for (std::size_t i = 0; i < config_.node_count; ++i) {
        SimNode node;
        node.node_id = derive_node_id(config_.seed, static_cast<std::uint32_t>(i));
        node.stake = config_.stakes.empty() ? 1 : config_.stakes[i];
        node.node_secret = derive_node_secret(config_.seed, static_cast<std::uint32_t>(i));
        nodes_.push_back(std::move(node));
    }
    staged_ = nodes_.front().replica;
}

std::vector<Validator> SimNetwork::validator_view() const {
    std::vector<Validator> view;
    view.reserve(nodes_.size());
    for (const SimNode& node : nodes_) view.push_back(Validator{node.node_id, node.stake});
    return view;
}

void SimNetwork::advance_clock(std::int64_t to) {
    if (to <= clock_) return;  // the clock never moves backwards
    clock_ = to;
}

void SimNetwork::require_registered(const Address& addr) const {
    if (!staged_.identity.is_registered(addr))
        throw UnregisteredUser("address " + addr.hex() + " is not registered");
}

Address SimNetwork::register_user(const std::string& email, const std::string& password) {
    Credential cred = make_credential(email, password);
    Hash32 cred_hash = credential_hash(cred);
    if (staged_.identity.registered.count(cred_hash))
        throw AlreadyRegistered("credential already registered");
    Address addr = derive_address(cred_hash);
    std::string tx = make_register_tx(cred_hash, addr, clock_);
    apply_tx(staged_, tx);
    pending_.push_back(std::move(tx));
    return addr;
}

AuthResult SimNetwork::login(const std::string& email, const std::string& password) const {
    return authenticate(canonical().identity, make_credential(email, password));
}

SimNode& SimNetwork::nearest_node(const Address& to) {
    SimNode* best = &nodes_.front();
    for (SimNode& node : nodes_) {
        auto candidate = std::make_pair(xor_distance(node.node_id, to), node.node_id);
        auto incumbent = std::make_pair(xor_distance(best->node_id, to), best->node_id);
        if (candidate < incumbent) best = &node;
    }
    return *best;
}

void SimNetwork::record_violation_everywhere(const Address& offender, int violation_type) {
    SimNode& handler = nearest_node(offender);
    clock_ += 1;

    ViolationTx violation;
    violation.tov = clock_;
    violation.uid = offender;
    violation.vt = violation_type;
    violation.nid = handler.node_id;
    violation.ns = violation_signature(violation, handler.node_secret);

    const Hash32 parent_hash = nodes_.front().replica.chain.tip_hash;
    const SideBlock& block =
        record_violation(nodes_.front().replica.side_chain, violation, parent_hash, clock_);
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        adopt_side_block(nodes_[i].replica.side_chain, block);
    staged_.side_chain = nodes_.front().replica.side_chain;
    if (on_side_block) on_side_block(block);
}

StoreResult SimNetwork::store_music(const Address& uploader,
                                    std::span<const std::uint8_t> file_bytes,
                                    const std::string& author, const std::string& title) {
    require_registered(uploader);
    PcmAudio audio = read_wav(file_bytes);
    Fingerprint fp = music_fingerprint(audio);

    // STOREMUSIC: compare against every registered fingerprint; an exact
    // match is a copyright violation regardless of who uploads.
    for (const auto& [root, file] : staged_.ledger.file_mapping) {
        if (file.fingerprint == fp) {
            record_violation_everywhere(uploader, kDuplicateUpload);
            return StoreResult{true, root, fp, clock_};
        }
    }

    FileManifest manifest = build_manifest(file_bytes, author, title, clock_);
    std::vector<Chunk> chunks = chunk_file(file_bytes);
    for (const Chunk& chunk : chunks) {
        Hash32 hash = chunk_hash(chunk);
        auto holders = locate_chunk(hash);
        holders.resize(std::min(kChunkReplication, holders.size()));
        for (const Address& holder : holders) {
            for (SimNode& node : nodes_)
                if (node.node_id == holder) node.store.put(chunk);
        }
        if (on_chunk) on_chunk(chunk);
    }
    if (on_manifest) on_manifest(manifest);

    TxContext ctx{uploader, clock_};
    std::string tx = make_add_block_tx(ctx, manifest.root, fp, author, title, config_.price_cents,
                                       manifest.chunk_hashes, manifest.file_size);
    apply_tx(staged_, tx);
    pending_.push_back(std::move(tx));
    return StoreResult{false, manifest.root, fp, clock_};
}

const FileManifest& SimNetwork::staged_manifest(const Hash32& root) const {
    auto it = staged_.manifests.find(root);
    if (it == staged_.manifests.end())
        throw NotFound("no file registered under " + root.hex());
    return it->second;
}

Bytes SimNetwork::fetch_and_reassemble(const FileManifest& manifest) {
    return reassemble(manifest, [this](const Hash32& hash) -> Chunk {
        for (const Address& holder : locate_chunk(hash)) {
            for (SimNode& node : nodes_) {
                if (node.node_id == holder && node.store.contains(hash)) return node.store.get(hash);
            }
        }
        throw ChunkUnavailable("chunk " + hash.hex() + " is missing from every holder");
    });
}

DownloadReceipt SimNetwork::download_file(const Address& requester, const Hash32& manifest_root) {
    require_registered(requester);
    const FileManifest manifest = staged_manifest(manifest_root);

    // Fetch first so a failed fetch leaves no half-recorded payment behind.
    Bytes bytes = fetch_and_reassemble(manifest);

    TxContext ctx{requester, clock_};
    DownloadGrant grant;
    try {
        grant = pay_and_download(staged_.ledger, ctx, manifest_root);
    } catch (const Revert& revert) {
        throw NotFound(revert.reason());
    }
    const FileData& file = staged_.ledger.file_mapping.at(manifest_root);
    pending_.push_back(make_pay_tx(ctx, manifest_root, file.price_cents));
    return DownloadReceipt{std::move(bytes), grant, file.price_cents, file.downloads};
}

Bytes SimNetwork::direct_fetch(const Address& requester, const Hash32& manifest_root) {
    require_registered(requester);
    const FileManifest manifest = staged_manifest(manifest_root);
    if (!chk_access(staged_.ledger, requester, manifest_root)) {
        record_violation_everywhere(requester, kUnauthorizedDownload);
        throw AccessDenied("address " + requester.hex() + " has no access to " +
                           manifest_root.hex());
    }
    return fetch_and_reassemble(manifest);
}

void SimNetwork::grant(const Address& owner, const Address& addr, const Hash32& hash) {
    require_registered(owner);
    TxContext ctx{owner, clock_};
    std::string tx = make_grant_tx(ctx, addr, hash);
    apply_tx(staged_, tx);
    pending_.push_back(std::move(tx));
}

void SimNetwork::revoke(const Address& owner, const Address& addr, const Hash32& hash) {
    require_registered(owner);
    TxContext ctx{owner, clock_};
    std::string tx = make_revoke_tx(ctx, addr, hash);
    apply_tx(staged_, tx);
    pending_.push_back(std::move(tx));
}

void SimNetwork::inject_tx(std::string tx_json) { pending_.push_back(std::move(tx_json)); }

RoundResult SimNetwork::consensus_round() {
    const std::uint64_t height = nodes_.front().replica.chain.height();
    const std::uint64_t word = rng_word(config_.seed, height);
    const auto validators = validator_view();
    const Address validator = select_validator(validators, word);

    SimNode* minter = nullptr;
    for (SimNode& node : nodes_)
        if (node.node_id == validator) minter = &node;

    // The elected validator replays the queue against its own replica and
    // drops whatever does not apply.
    RoundResult result;
    ReplicaState work = minter->replica;
    std::vector<std::string> valid;
    for (std::string& tx : pending_) {
        try {
            apply_tx(work, tx);
            valid.push_back(std::move(tx));
        } catch (const Error& err) {
            result.rejected.emplace_back(std::move(tx), err.what());
        }
    }
    pending_.clear();

    clock_ += 1;
    result.block = make_block(minter->replica.chain, std::move(valid), validator, clock_);
    broadcast_block(result.block);
    staged_ = nodes_.front().replica;
    if (on_block) on_block(result.block);
    return result;
}

void SimNetwork::broadcast_block(const ParentBlock& block) {
    // Every node validates independently before anything commits.
    std::vector<ReplicaState> next;
    next.reserve(nodes_.size());
    for (SimNode& node : nodes_) {
        ChainValidity check = validate_candidate(node.replica.chain, block);
        if (!check.ok) throw ConsensusFailure(node.node_id.hex(), check.reason);
        ReplicaState work = node.replica;
        for (const std::string& tx : block.transactions) {
            try {
                apply_tx(work, tx);
            } catch (const Error& err) {
                throw ConsensusFailure(node.node_id.hex(),
                                       std::string("transaction replay failed: ") + err.what());
            }
        }
        adopt_block(work.chain, block);
        next.push_back(std::move(work));
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].replica = std::move(next[i]);

    if (!replicas_consistent())
        throw ConsensusFailure(nodes_.front().node_id.hex(), "replica digests diverged");
}

bool SimNetwork::replicas_consistent() const {
    Hash32 first = replica_digest(nodes_.front().replica);
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (replica_digest(nodes_[i].replica) != first) return false;
    return true;
}

std::vector<Address> SimNetwork::locate_chunk(const Hash32& chunk_hash) const {
    Address key = Address::from_span(
        std::span<const std::uint8_t>(chunk_hash.bytes.data(), Address::size()));
    std::vector<Address> ids;
    ids.reserve(nodes_.size());
    for (const SimNode& node : nodes_) ids.push_back(node.node_id);
    std::sort(ids.begin(), ids.end(), [&key](const Address& a, const Address& b) {
        auto da = xor_distance(a, key);
        auto db = xor_distance(b, key);
        if (da != db) return da < db;
        return a < b;
    });
    return ids;
}

void SimNetwork::adopt_logged_block(const ParentBlock& block) {
    broadcast_block(block);
    advance_clock(static_cast<std::int64_t>(block.header.timestamp));
    staged_ = nodes_.front().replica;
}

void SimNetwork::adopt_logged_side_block(const SideBlock& block) {
    for (SimNode& node : nodes_) adopt_side_block(node.replica.side_chain, block);
    advance_clock(block.chain_time);
    staged_ = nodes_.front().replica;
}

void SimNetwork::seed_chunk(Chunk chunk) {
    Hash32 hash = chunk_hash(chunk);
    auto holders = locate_chunk(hash);
    holders.resize(std::min(kChunkReplication, holders.size()));
    for (const Address& holder : holders) {
        for (SimNode& node : nodes_)
            if (node.node_id == holder) node.store.put(chunk);
    }
}

}  // namespace tunechain
