#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "tunechain/bytes.hpp"

namespace tunechain {

// Validated login credential; the email is lowercased.
struct Credential {
    std::string email;
    std::string password;
};

// Validates and normalizes; throws InvalidCredential on malformed input.
Credential make_credential(std::string email, std::string password);

// SHA-256(lowercase(email) || 0x1F || password).
Hash32 credential_hash(const Credential& cred);

// First 20 bytes of SHA-256(credential hash || "addr").
Address derive_address(const Hash32& cred_hash);

// Registered credential hashes and their derived addresses, rebuilt from the
// chain's registration transactions.
struct IdentityState {
    std::map<Hash32, Address> registered;
    std::set<Address> addresses;

    bool is_registered(const Address& addr) const { return addresses.count(addr) > 0; }
    void insert(const Hash32& cred_hash, const Address& addr) {
        registered.emplace(cred_hash, addr);
        addresses.insert(addr);
    }
};

// Throws AlreadyRegistered when the credential hash is already recorded.
Address register_user(IdentityState& state, const Credential& cred);

struct AuthResult {
    bool granted = false;
    Address address;
};

AuthResult authenticate(const IdentityState& state, const Credential& cred);

// Canonical registration transaction; only the hash and the derived address
// are recorded, never the plaintext credential.
std::string make_register_tx(const Hash32& cred_hash, const Address& addr, std::int64_t now);

std::string serialize_identity(const IdentityState& state);

}  // namespace tunechain
