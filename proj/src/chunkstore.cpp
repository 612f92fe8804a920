#include "tunechain/chunkstore.hpp"

#include <fstream>

#include <json.hpp>

#include "tunechain/errors.hpp"
#include "tunechain/sha256.hpp"

namespace tunechain {

std::vector<Chunk> chunk_file(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw InvalidInput("chunk_file: empty input");
    std::vector<Chunk> chunks;
    for (std::size_t at = 0; at < bytes.size(); at += kChunkSize) {
        std::size_t take = std::min(kChunkSize, bytes.size() - at);
        chunks.push_back(Chunk{Bytes(bytes.begin() + at, bytes.begin() + at + take)});
    }
    return chunks;
}

Hash32 chunk_hash(const Chunk& chunk) { return sha256(chunk.data); }

Hash32 merkle_root(std::span<const Hash32> leaves) {
    if (leaves.empty()) throw InvalidInput("merkle_root: empty leaf list");
    std::vector<Hash32> level(leaves.begin(), leaves.end());
    while (level.size() > 1) {
        if (level.size() % 2 != 0) level.push_back(level.back());
        std::vector<Hash32> next;
        next.reserve(level.size() / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            std::uint8_t pair[64];
            std::copy(level[i].bytes.begin(), level[i].bytes.end(), pair);
            std::copy(level[i + 1].bytes.begin(), level[i + 1].bytes.end(), pair + 32);
            next.push_back(sha256d(pair));
        }
        level = std::move(next);
    }
    return level.front();
}

FileManifest build_manifest(std::span<const std::uint8_t> bytes, std::string author,
                            std::string title, std::int64_t date) {
    FileManifest manifest;
    for (const Chunk& chunk : chunk_file(bytes)) manifest.chunk_hashes.push_back(chunk_hash(chunk));
    manifest.root = merkle_root(manifest.chunk_hashes);
    manifest.file_size = bytes.size();
    manifest.author = std::move(author);
    manifest.title = std::move(title);
    manifest.date = date;
    return manifest;
}

Hash32 ChunkStore::put(Chunk chunk) {
    if (chunk.data.empty() || chunk.data.size() > kChunkSize)
        throw InvalidInput("put: chunk must hold 1..262144 bytes");
    Hash32 hash = chunk_hash(chunk);
    chunks_.emplace(hash, std::move(chunk));
    return hash;
}

const Chunk& ChunkStore::get(const Hash32& hash) const {
    auto it = chunks_.find(hash);
    if (it == chunks_.end()) throw NotFound("chunk " + hash.hex() + " not in store");
    return it->second;
}

Bytes reassemble(const FileManifest& manifest, const ChunkFetcher& fetch) {
    if (manifest.chunk_hashes.empty()) throw InvalidInput("reassemble: manifest has no chunks");
    if (merkle_root(manifest.chunk_hashes) != manifest.root)
        throw IntegrityError("manifest root does not match its chunk hashes", -1);

    Bytes out;
    out.reserve(manifest.file_size);
    for (std::size_t i = 0; i < manifest.chunk_hashes.size(); ++i) {
        Chunk chunk = fetch(manifest.chunk_hashes[i]);
        if (chunk_hash(chunk) != manifest.chunk_hashes[i])
            throw IntegrityError("chunk " + std::to_string(i) + " does not match its hash",
                                 static_cast<int>(i));
        append_bytes(out, chunk.data);
    }
    if (out.size() != manifest.file_size)
        throw IntegrityError("reassembled size does not match manifest file_size", -1);
    return out;
}

std::string manifest_to_json(const FileManifest& manifest) {
    nlohmann::json doc;
    doc["author"] = manifest.author;
    doc["chunks"] = nlohmann::json::array();
    for (const Hash32& h : manifest.chunk_hashes) doc["chunks"].push_back(h.hex());
    doc["date"] = manifest.date;
    doc["file_size"] = manifest.file_size;
    doc["root"] = manifest.root.hex();
    doc["title"] = manifest.title;
    return doc.dump();
}

FileManifest manifest_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    FileManifest manifest;
    manifest.author = doc.at("author").get<std::string>();
    for (const auto& h : doc.at("chunks"))
        manifest.chunk_hashes.push_back(Hash32::parse_hex(h.get<std::string>()));
    manifest.date = doc.at("date").get<std::int64_t>();
    manifest.file_size = doc.at("file_size").get<std::uint64_t>();
    manifest.root = Hash32::parse_hex(doc.at("root").get<std::string>());
    manifest.title = doc.at("title").get<std::string>();
    return manifest;
}

void write_chunk_file(const std::filesystem::path& datadir, const Chunk& chunk) {
    auto dir = datadir / "chunks";
    std::filesystem::create_directories(dir);
    auto path = dir / chunk_hash(chunk).hex();
    if (std::filesystem::exists(path)) return;
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(chunk.data.data()),
              static_cast<std::streamsize>(chunk.data.size()));
    if (!out) throw Error("failed to write chunk file " + path.string());
}

Chunk read_chunk_file(const std::filesystem::path& datadir, const Hash32& hash) {
    auto path = datadir / "chunks" / hash.hex();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("chunk file " + path.string() + " missing");
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return Chunk{std::move(data)};
}

void write_manifest_file(const std::filesystem::path& datadir, const FileManifest& manifest) {
    auto dir = datadir / "manifests";
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / (manifest.root.hex() + ".json"), std::ios::binary);
    out << manifest_to_json(manifest);
    if (!out) throw Error("failed to write manifest for " + manifest.root.hex());
}

}  // namespace tunechain
