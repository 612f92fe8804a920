#include "tunechain/identity.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "tunechain/errors.hpp"
#include "tunechain/sha256.hpp"

namespace tunechain {

Credential make_credential(std::string email, std::string password) {
    std::transform(email.begin(), email.end(), email.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (email.empty()) throw InvalidCredential("email is empty");
    if (std::count(email.begin(), email.end(), '@') != 1)
        throw InvalidCredential("email must contain exactly one '@'");
    if (password.empty()) throw InvalidCredential("password is empty");
    return Credential{std::move(email), std::move(password)};
}

Hash32 credential_hash(const Credential& cred) {
    Sha256 digest;
    digest.update(cred.email);
    const std::uint8_t separator = 0x1f;
    digest.update(std::span<const std::uint8_t>(&separator, 1));
    digest.update(cred.password);
    return digest.finish();
}

Address derive_address(const Hash32& cred_hash) {
    Sha256 digest;
    digest.update(cred_hash.bytes);
    digest.update("addr");
    Hash32 full = digest.finish();
    return Address::from_span(std::span<const std::uint8_t>(full.bytes.data(), Address::size()));
}

Address register_user(IdentityState& state, const Credential& cred) {
    Hash32 hash = credential_hash(cred);
    if (state.registered.count(hash)) throw AlreadyRegistered("credential already registered");
    Address addr = derive_address(hash);
    state.insert(hash, addr);
    return addr;
}

AuthResult authenticate(const IdentityState& state, const Credential& cred) {
    auto it = state.registered.find(credential_hash(cred));
    if (it == state.registered.end()) return AuthResult{false, Address{}};
    return AuthResult{true, it->second};
}

std::string make_register_tx(const Hash32& cred_hash, const Address& addr, std::int64_t now) {
    return nlohmann::json{{"addr", addr.hex()},
                          {"caller", addr.hex()},
                          {"hash", cred_hash.hex()},
                          {"kind", "register"},
                          {"timestamp", now}}
        .dump();
}

std::string serialize_identity(const IdentityState& state) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [hash, addr] : state.registered) doc[hash.hex()] = addr.hex();
    return doc.dump();
}

}  // namespace tunechain
