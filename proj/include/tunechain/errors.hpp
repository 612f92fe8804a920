#pragma once

#include <stdexcept>
#include <string>

namespace tunechain {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A precondition on the input was violated (empty input, wrong length, ...).
struct InvalidInput : Error {
    using Error::Error;
};

// Input container is recognized but uses an unsupported encoding.
struct UnsupportedFormat : Error {
    using Error::Error;
};

// Input container is damaged or shorter than its own header claims.
struct MalformedFile : Error {
    using Error::Error;
};

// Lookup of a key that is not present.
struct NotFound : Error {
    using Error::Error;
};

// Stored data does not match its recorded hash. chunk_index is the
// zero-based offending chunk, or -1 when the manifest root itself fails.
struct IntegrityError : Error {
    int chunk_index;
    explicit IntegrityError(const std::string& msg, int index = -1)
        : Error(msg), chunk_index(index) {}
};

// Contract transaction failure; state is left untouched.
struct Revert : Error {
    explicit Revert(const std::string& why) : Error(why) {}
    std::string reason() const { return what(); }
};

struct AlreadyRegistered : Error {
    using Error::Error;
};

struct InvalidCredential : Error {
    using Error::Error;
};

struct UnregisteredUser : Error {
    using Error::Error;
};

// Chunk fetch without access rights.
struct AccessDenied : Error {
    using Error::Error;
};

// Every holder of a requested chunk is missing it.
struct ChunkUnavailable : Error {
    using Error::Error;
};

// Another process holds the datadir.
struct Locked : Error {
    using Error::Error;
};

// A node rejected a broadcast block; the simulation cannot continue.
struct ConsensusFailure : Error {
    std::string node;
    ConsensusFailure(std::string node_id, const std::string& why)
        : Error("consensus failure at node " + node_id + ": " + why),
          node(std::move(node_id)) {}
};

}  // namespace tunechain
