#include "tunechain/contract.hpp"

#include <algorithm>

#include <json.hpp>

#include "tunechain/errors.hpp"
#include "tunechain/sha256.hpp"

namespace tunechain {

namespace {

FileData& lookup(ContractState& state, const Hash32& hash) {
    auto it = state.file_mapping.find(hash);
    if (it == state.file_mapping.end()) throw Revert("unknown hash");
    return it->second;
}

void append_allowed_once(FileData& file, const Address& addr) {
    if (std::find(file.allowed_addresses.begin(), file.allowed_addresses.end(), addr) ==
        file.allowed_addresses.end())
        file.allowed_addresses.push_back(addr);
}

// Shared owner gate for grant/remove.
FileData& checked_owner_entry(ContractState& state, const TxContext& ctx, const Address& addr,
                              const Hash32& hash) {
    if (addr.is_zero()) throw Revert("empty address");
    if (hash.is_zero()) throw Revert("empty hash");
    FileData& file = lookup(state, hash);
    if (ctx.caller != file.owner) throw Revert("not owner");
    return file;
}

}  // namespace

void add_block(ContractState& state, const TxContext& ctx, const Hash32& hash,
               const Fingerprint& fp, const std::string& author, const std::string& title,
               std::int64_t date, std::int64_t price_cents) {
    if (ctx.caller.is_zero()) throw Revert("empty caller");
    if (hash.is_zero()) throw Revert("empty hash");
    if (state.file_mapping.count(hash)) throw Revert("exists");
    if (price_cents < 0) throw Revert("negative price");
    for (const auto& [_, file] : state.file_mapping)
        if (file.fingerprint == fp) throw Revert("duplicate fingerprint");

    FileData file;
    file.owner = ctx.caller;
    file.price_cents = price_cents;
    file.fingerprint = fp;
    file.manifest_root = hash;
    file.author = author;
    file.title = title;
    file.uploaded_at = date;
    state.file_mapping.emplace(hash, std::move(file));
}

void grant_access(ContractState& state, const TxContext& ctx, const Address& addr,
                  const Hash32& hash) {
    FileData& file = checked_owner_entry(state, ctx, addr, hash);
    file.access[addr] = true;
    append_allowed_once(file, addr);
}

void remove_access(ContractState& state, const TxContext& ctx, const Address& addr,
                   const Hash32& hash) {
    FileData& file = checked_owner_entry(state, ctx, addr, hash);
    file.access[addr] = false;
}

bool music_owner(const ContractState& state, const TxContext& ctx, const Hash32& hash) {
    if (hash.is_zero()) return false;
    auto it = state.file_mapping.find(hash);
    if (it == state.file_mapping.end()) return false;
    return ctx.caller == it->second.owner;
}

bool chk_access(const ContractState& state, const Address& addr, const Hash32& hash) {
    if (addr.is_zero() || hash.is_zero()) return false;
    auto it = state.file_mapping.find(hash);
    if (it == state.file_mapping.end()) return false;
    if (addr == it->second.owner) return true;
    auto granted = it->second.access.find(addr);
    return granted != it->second.access.end() && granted->second;
}

DownloadGrant pay_and_download(ContractState& state, const TxContext& ctx, const Hash32& hash) {
    if (ctx.caller.is_zero()) throw Revert("empty caller");
    FileData& file = lookup(state, hash);

    file.access[ctx.caller] = true;
    append_allowed_once(file, ctx.caller);
    file.downloads += 1;

    Bytes receipt_src;
    append_bytes(receipt_src, hash.bytes);
    append_bytes(receipt_src, ctx.caller.bytes);
    append_u64_be(receipt_src, file.downloads);
    return DownloadGrant{hash, ctx.caller, sha256(receipt_src).hex().substr(0, 16)};
}

std::int64_t revenue(const ContractState& state, const Hash32& hash) {
    auto it = state.file_mapping.find(hash);
    if (it == state.file_mapping.end()) throw NotFound("no file registered under " + hash.hex());
    return static_cast<std::int64_t>(it->second.downloads) * it->second.price_cents;
}

std::vector<RevenueRow> revenue_report(const ContractState& state) {
    std::vector<std::pair<Hash32, const FileData*>> entries;
    for (const auto& [hash, file] : state.file_mapping) entries.emplace_back(hash, &file);
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second->uploaded_at != b.second->uploaded_at)
            return a.second->uploaded_at > b.second->uploaded_at;
        return a.first < b.first;
    });

    std::vector<RevenueRow> rows;
    rows.reserve(entries.size());
    for (const auto& [hash, file] : entries) {
        rows.push_back(RevenueRow{file->author, file->title, file->uploaded_at, file->downloads,
                                  static_cast<std::int64_t>(file->downloads) * file->price_cents});
    }
    return rows;
}

std::string serialize_state(const ContractState& state) {
    nlohmann::json mapping = nlohmann::json::object();
    for (const auto& [hash, file] : state.file_mapping) {
        nlohmann::json access = nlohmann::json::object();
        for (const auto& [addr, granted] : file.access) access[addr.hex()] = granted;
        nlohmann::json allowed = nlohmann::json::array();
        for (const Address& addr : file.allowed_addresses) allowed.push_back(addr.hex());
        mapping[hash.hex()] = {
            {"access", std::move(access)},
            {"allowed", std::move(allowed)},
            {"author", file.author},
            {"downloads", file.downloads},
            {"fingerprint", file.fingerprint.value},
            {"owner", file.owner.hex()},
            {"price_cents", file.price_cents},
            {"title", file.title},
            {"uploaded_at", file.uploaded_at},
        };
    }
    return nlohmann::json{{"file_mapping", std::move(mapping)}}.dump();
}

std::string make_add_block_tx(const TxContext& ctx, const Hash32& hash, const Fingerprint& fp,
                              const std::string& author, const std::string& title,
                              std::int64_t price_cents, const std::vector<Hash32>& chunk_hashes,
                              std::uint64_t file_size) {
    nlohmann::json chunks = nlohmann::json::array();
    for (const Hash32& h : chunk_hashes) chunks.push_back(h.hex());
    return nlohmann::json{
        {"author", author},
        {"caller", ctx.caller.hex()},
        {"cents", price_cents},
        {"chunks", std::move(chunks)},
        {"file_size", file_size},
        {"fingerprint", fp.value},
        {"hash", hash.hex()},
        {"kind", "add_block"},
        {"timestamp", ctx.now},
        {"title", title},
    }.dump();
}

std::string make_grant_tx(const TxContext& ctx, const Address& addr, const Hash32& hash) {
    return nlohmann::json{{"addr", addr.hex()},
                          {"caller", ctx.caller.hex()},
                          {"hash", hash.hex()},
                          {"kind", "grant"},
                          {"timestamp", ctx.now}}
        .dump();
}

std::string make_revoke_tx(const TxContext& ctx, const Address& addr, const Hash32& hash) {
    return nlohmann::json{{"addr", addr.hex()},
                          {"caller", ctx.caller.hex()},
                          {"hash", hash.hex()},
                          {"kind", "revoke"},
                          {"timestamp", ctx.now}}
        .dump();
}

std::string make_pay_tx(const TxContext& ctx, const Hash32& hash, std::int64_t cents) {
    return nlohmann::json{{"caller", ctx.caller.hex()},
                          {"cents", cents},
                          {"hash", hash.hex()},
                          {"kind", "pay"},
                          {"timestamp", ctx.now}}
        .dump();
}

}  // namespace tunechain
