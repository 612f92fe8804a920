#pragma once

#include <filesystem>
#include <memory>

#include "tunechain/netsim.hpp"

namespace tunechain {

// Refuses a second concurrent opener of the same datadir.
class DirLock {
public:
    explicit DirLock(const std::filesystem::path& root);
    ~DirLock();
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::filesystem::path path_;
    bool held_ = false;
};

struct DatadirConfig {
    std::size_t nodes = 4;
    std::int64_t price_cents = 137;
    std::uint64_t seed = 42;
};

// Persistent home of one simulated network.
//
// Layout: config.json, state.json (clock checkpoint), chain.log and
// sidechain.log (one canonical-JSON block per line, append-only),
// chunks/<hash>, manifests/<root>.json. All consensus state is rebuilt from
// the logs on open; the passed config only applies when the directory is
// first created.
class Datadir {
public:
    Datadir(std::filesystem::path root, DatadirConfig config);

    SimNetwork& network() { return *net_; }
    const SimNetwork& network() const { return *net_; }
    const std::filesystem::path& root() const { return root_; }
    const DatadirConfig& config() const { return config_; }

    // Persists the simulation clock; call after each completed command.
    void checkpoint();

private:
    void replay_logs();
    void seed_chunks();
    void install_hooks();
    void append_line(const std::filesystem::path& file, const std::string& line);

    std::filesystem::path root_;
    DatadirConfig config_;
    std::unique_ptr<SimNetwork> net_;
};

}  // namespace tunechain
