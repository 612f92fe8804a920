#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tunechain/bytes.hpp"

namespace tunechain {

constexpr std::size_t kChunkSize = 256 * 1024;

// Nonempty slice of file bytes, at most 256 KiB.
struct Chunk {
    Bytes data;
};

// Ordered chunk hashes under one Merkle root plus the file metadata that is
// registered on chain.
struct FileManifest {
    Hash32 root;
    std::vector<Hash32> chunk_hashes;
    std::uint64_t file_size = 0;
    std::string author;
    std::string title;
    std::int64_t date = 0;  // UTC seconds
};

std::vector<Chunk> chunk_file(std::span<const std::uint8_t> bytes);

Hash32 chunk_hash(const Chunk& chunk);

// Leaf hashes are taken as given; interior nodes are double-SHA256 of the
// concatenated children, a level with odd count duplicates its last element,
// and a single leaf is its own root.
Hash32 merkle_root(std::span<const Hash32> leaves);

FileManifest build_manifest(std::span<const std::uint8_t> bytes, std::string author,
                            std::string title, std::int64_t date);

// In-memory content-addressed store. Writes are idempotent. Any number of
// concurrent readers is fine; writes follow a single-writer contract.
class ChunkStore {
public:
    Hash32 put(Chunk chunk);
    const Chunk& get(const Hash32& hash) const;
    bool contains(const Hash32& hash) const { return chunks_.count(hash) > 0; }
    void erase(const Hash32& hash) { chunks_.erase(hash); }
    std::size_t size() const { return chunks_.size(); }

private:
    std::map<Hash32, Chunk> chunks_;
};

using ChunkFetcher = std::function<Chunk(const Hash32&)>;

// Fetches the manifest's chunks in order, verifying each chunk hash and the
// recomputed Merkle root, and returns the concatenated bytes.
Bytes reassemble(const FileManifest& manifest, const ChunkFetcher& fetch);

// On-disk layout: <dir>/chunks/<64-hex-hash> and
// <dir>/manifests/<64-hex-root>.json (canonical JSON).
void write_chunk_file(const std::filesystem::path& datadir, const Chunk& chunk);
Chunk read_chunk_file(const std::filesystem::path& datadir, const Hash32& hash);
void write_manifest_file(const std::filesystem::path& datadir, const FileManifest& manifest);

std::string manifest_to_json(const FileManifest& manifest);
FileManifest manifest_from_json(const std::string& text);

}  // namespace tunechain
