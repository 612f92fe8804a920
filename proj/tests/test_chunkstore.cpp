#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tunechain/chunkstore.hpp"
#include "tunechain/errors.hpp"
#include "tunechain/sha256.hpp"

using namespace tunechain;

namespace {

Bytes random_bytes(std::size_t count, std::uint32_t seed) {
    std::mt19937 rng(seed);
    Bytes out(count);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

Hash32 oracle_hash(const Bytes& data) {
    return Hash32::from_span(testsupport::ref_sha256(data));
}

// Hand-expanded interior node: double-SHA256 of the concatenated children,
// entirely through the reference oracle.
Hash32 oracle_pair(const Hash32& left, const Hash32& right) {
    Bytes concat(left.bytes.begin(), left.bytes.end());
    concat.insert(concat.end(), right.bytes.begin(), right.bytes.end());
    auto once = testsupport::ref_sha256(concat);
    return Hash32::from_span(
        testsupport::ref_sha256(std::vector<std::uint8_t>(once.begin(), once.end())));
}

ChunkFetcher store_fetcher(const ChunkStore& store) {
    return [&store](const Hash32& hash) { return store.get(hash); };
}

}  // namespace

TEST_CASE("chunk_file splits at the 256 KiB boundary") {
    CHECK(chunk_file(random_bytes(100, 1)).size() == 1);
    CHECK(chunk_file(random_bytes(100, 1))[0].data.size() == 100);

    auto exact = chunk_file(random_bytes(kChunkSize, 2));
    REQUIRE(exact.size() == 1);
    CHECK(exact[0].data.size() == kChunkSize);

    auto over = chunk_file(random_bytes(kChunkSize + 1, 3));
    REQUIRE(over.size() == 2);
    CHECK(over[0].data.size() == kChunkSize);
    CHECK(over[1].data.size() == 1);

    CHECK(chunk_file(random_bytes(1024 * 1024, 4)).size() == 4);

    CHECK_THROWS_AS(chunk_file(Bytes{}), InvalidInput);
}

TEST_CASE("chunk concatenation reproduces the input") {
    Bytes input = random_bytes(1024 * 1024, 5);
    Bytes rebuilt;
    for (const Chunk& chunk : chunk_file(input))
        rebuilt.insert(rebuilt.end(), chunk.data.begin(), chunk.data.end());
    CHECK(rebuilt == input);
}

TEST_CASE("chunk_hash is plain SHA-256 of the bytes") {
    Chunk abc{Bytes{'a', 'b', 'c'}};
    CHECK(chunk_hash(abc).hex() ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    Bytes data = random_bytes(1000, 6);
    CHECK(chunk_hash(Chunk{data}) == oracle_hash(data));
    Bytes tweaked = data;
    tweaked[500] ^= 0x01;
    CHECK(chunk_hash(Chunk{data}) != chunk_hash(Chunk{tweaked}));
}

TEST_CASE("merkle_root: single leaf is its own root") {
    Hash32 leaf = oracle_hash(random_bytes(10, 7));
    CHECK(merkle_root(std::vector<Hash32>{leaf}) == leaf);
}

TEST_CASE("merkle_root of a pair is double-SHA256 of the concatenation") {
    Hash32 h1 = oracle_hash(random_bytes(10, 8));
    Hash32 h2 = oracle_hash(random_bytes(10, 9));
    CHECK(merkle_root(std::vector<Hash32>{h1, h2}) == oracle_pair(h1, h2));
}

TEST_CASE("merkle_root of three leaves duplicates the last") {
    Hash32 h1 = oracle_hash(random_bytes(10, 10));
    Hash32 h2 = oracle_hash(random_bytes(10, 11));
    Hash32 h3 = oracle_hash(random_bytes(10, 12));
    Hash32 expected = oracle_pair(oracle_pair(h1, h2), oracle_pair(h3, h3));
    CHECK(merkle_root(std::vector<Hash32>{h1, h2, h3}) == expected);
}

TEST_CASE("merkle_root rejects an empty list") {
    CHECK_THROWS_AS(merkle_root(std::vector<Hash32>{}), InvalidInput);
}

TEST_CASE("odd-count duplication is observable") {
    Hash32 leaf = oracle_hash(random_bytes(10, 13));
    for (std::size_t n : {3u, 5u, 7u}) {
        std::vector<Hash32> odd(n, leaf);
        std::vector<Hash32> padded(n + 1, leaf);
        CHECK(merkle_root(odd) == merkle_root(padded));
    }
}

TEST_CASE("store put/get round trip, idempotence, absent key") {
    ChunkStore store;
    Chunk chunk{random_bytes(1000, 14)};
    Hash32 hash = store.put(chunk);
    CHECK(store.get(hash).data == chunk.data);

    CHECK(store.put(chunk) == hash);
    CHECK(store.size() == 1);

    Hash32 absent = oracle_hash(random_bytes(4, 15));
    CHECK_THROWS_AS(store.get(absent), NotFound);

    CHECK_THROWS_AS(store.put(Chunk{}), InvalidInput);
    CHECK_THROWS_AS(store.put(Chunk{random_bytes(kChunkSize + 1, 16)}), InvalidInput);
}

TEST_CASE("reassemble returns the original bytes") {
    Bytes input = random_bytes(1024 * 1024, 17);
    FileManifest manifest = build_manifest(input, "a", "t", 0);
    ChunkStore store;
    for (const Chunk& chunk : chunk_file(input)) store.put(chunk);
    CHECK(reassemble(manifest, store_fetcher(store)) == input);
}

TEST_CASE("reassemble reports the offending chunk index") {
    Bytes input = random_bytes(3 * kChunkSize, 18);
    FileManifest manifest = build_manifest(input, "a", "t", 0);
    ChunkStore store;
    for (const Chunk& chunk : chunk_file(input)) store.put(chunk);

    // A fetcher that hands back corrupted bytes for the middle chunk.
    ChunkFetcher lying = [&](const Hash32& hash) {
        Chunk chunk = store.get(hash);
        if (hash == manifest.chunk_hashes[1]) chunk.data[0] ^= 0xff;
        return chunk;
    };
    try {
        reassemble(manifest, lying);
        FAIL("expected IntegrityError");
    } catch (const IntegrityError& err) {
        CHECK(err.chunk_index == 1);
    }
}

TEST_CASE("reassemble rejects a manifest whose root was replaced") {
    Bytes input = random_bytes(1000, 19);
    FileManifest manifest = build_manifest(input, "a", "t", 0);
    manifest.root = oracle_hash(random_bytes(8, 20));
    ChunkStore store;
    for (const Chunk& chunk : chunk_file(input)) store.put(chunk);
    CHECK_THROWS_AS(reassemble(manifest, store_fetcher(store)), IntegrityError);
}

TEST_CASE("missing chunks surface as NotFound") {
    Bytes input = random_bytes(1000, 21);
    FileManifest manifest = build_manifest(input, "a", "t", 0);
    ChunkStore store;  // intentionally empty
    CHECK_THROWS_AS(reassemble(manifest, store_fetcher(store)), NotFound);
}

TEST_CASE("content addressing: equal bytes share a root, different bytes do not") {
    std::mt19937 rng(22);
    std::uniform_int_distribution<std::size_t> size_dist(1, 3 * kChunkSize);
    for (int trial = 0; trial < 10; ++trial) {
        Bytes input = random_bytes(size_dist(rng), 1000 + trial);
        FileManifest a = build_manifest(input, "x", "y", 0);
        FileManifest b = build_manifest(input, "x", "y", 0);
        CHECK(a.root == b.root);

        Bytes changed = input;
        changed[rng() % changed.size()] ^= 0x40;
        CHECK(build_manifest(changed, "x", "y", 0).root != a.root);

        ChunkStore store;
        for (const Chunk& chunk : chunk_file(input)) store.put(chunk);
        CHECK(reassemble(a, store_fetcher(store)) == input);
    }
}

TEST_CASE("manifest JSON round trip and on-disk layout") {
    testsupport::TempDir dir;
    Bytes input = random_bytes(100000, 23);
    FileManifest manifest = build_manifest(input, "Ada", "Étude", 1582156800);

    FileManifest parsed = manifest_from_json(manifest_to_json(manifest));
    CHECK(parsed.root == manifest.root);
    CHECK(parsed.chunk_hashes == manifest.chunk_hashes);
    CHECK(parsed.file_size == manifest.file_size);
    CHECK(parsed.author == manifest.author);
    CHECK(parsed.title == manifest.title);
    CHECK(parsed.date == manifest.date);

    write_manifest_file(dir.path(), manifest);
    CHECK(std::filesystem::exists(dir.path() / "manifests" / (manifest.root.hex() + ".json")));

    for (const Chunk& chunk : chunk_file(input)) {
        write_chunk_file(dir.path(), chunk);
        Hash32 hash = chunk_hash(chunk);
        CHECK(std::filesystem::exists(dir.path() / "chunks" / hash.hex()));
        CHECK(read_chunk_file(dir.path(), hash).data == chunk.data);
    }
    CHECK_THROWS_AS(read_chunk_file(dir.path(), oracle_hash(random_bytes(4, 24))), NotFound);
}
