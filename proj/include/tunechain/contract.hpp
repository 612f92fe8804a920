#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tunechain/bytes.hpp"
#include "tunechain/fingerprint.hpp"

namespace tunechain {

// Caller identity and time of a contract transaction (the msg.sender view).
struct TxContext {
    Address caller;
    std::int64_t now = 0;  // UTC seconds
};

// Per-file contract record.
struct FileData {
    Address owner;
    std::map<Address, bool> access;
    std::vector<Address> allowed_addresses;
    std::uint64_t downloads = 0;
    std::int64_t price_cents = 0;
    Fingerprint fingerprint;
    Hash32 manifest_root;
    std::string author;
    std::string title;
    std::int64_t uploaded_at = 0;
};

struct ContractState {
    std::map<Hash32, FileData> file_mapping;
};

struct DownloadGrant {
    Hash32 hash;
    Address granted_to;
    std::string receipt_id;
};

struct RevenueRow {
    std::string author;
    std::string title;
    std::int64_t uploaded_at = 0;
    std::uint64_t downloads = 0;
    std::int64_t revenue_cents = 0;
};

// Registers a file under its manifest root with owner = ctx.caller.
// Reverts: "empty caller", "empty hash", "exists", "duplicate fingerprint",
// "negative price". A revert leaves the state untouched.
void add_block(ContractState& state, const TxContext& ctx, const Hash32& hash,
               const Fingerprint& fp, const std::string& author, const std::string& title,
               std::int64_t date, std::int64_t price_cents);

// Owner-only: marks addr as granted and appends it to allowedAddresses once.
// Reverts: "empty address", "empty hash", "unknown hash", "not owner".
void grant_access(ContractState& state, const TxContext& ctx, const Address& addr,
                  const Hash32& hash);

// Owner-only: clears the grant; addr stays in allowedAddresses as history.
void remove_access(ContractState& state, const TxContext& ctx, const Address& addr,
                   const Hash32& hash);

// True iff ctx.caller is the recorded owner. Total: empty or unknown → false.
bool music_owner(const ContractState& state, const TxContext& ctx, const Hash32& hash);

// True iff addr is the owner or currently granted. Total: empty or unknown → false.
bool chk_access(const ContractState& state, const Address& addr, const Hash32& hash);

// Records a payment of price_cents, grants the caller access, increments the
// download count. Each call re-meets the terms, owner included.
// Reverts: "empty caller", "unknown hash".
DownloadGrant pay_and_download(ContractState& state, const TxContext& ctx, const Hash32& hash);

// downloads x price_cents, exact integer arithmetic. Unknown hash → NotFound.
std::int64_t revenue(const ContractState& state, const Hash32& hash);

// One row per file, newest upload first.
std::vector<RevenueRow> revenue_report(const ContractState& state);

// Canonical JSON of the full state (sorted keys, no whitespace).
std::string serialize_state(const ContractState& state);

// --- canonical transaction records -------------------------------------
// {kind, caller, hash, addr?, cents?, timestamp, ...} as canonical JSON.
// add_block records also carry the fields a replica needs to rebuild the
// file entry and its manifest: fingerprint, author, title, chunks, file_size.

std::string make_add_block_tx(const TxContext& ctx, const Hash32& hash, const Fingerprint& fp,
                              const std::string& author, const std::string& title,
                              std::int64_t price_cents, const std::vector<Hash32>& chunk_hashes,
                              std::uint64_t file_size);
std::string make_grant_tx(const TxContext& ctx, const Address& addr, const Hash32& hash);
std::string make_revoke_tx(const TxContext& ctx, const Address& addr, const Hash32& hash);
std::string make_pay_tx(const TxContext& ctx, const Hash32& hash, std::int64_t cents);

}  // namespace tunechain
