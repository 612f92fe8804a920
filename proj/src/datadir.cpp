#include "tunechain/datadir.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>

#include <json.hpp>

#include "tunechain/errors.hpp"

namespace tunechain {

DirLock::DirLock(const std::filesystem::path& root) : path_(root / "lock") {
    std::filesystem::create_directories(root);
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) throw Locked("datadir " + root.string() + " is locked by another process");
    ::close(fd);
    held_ = true;
}

DirLock::~DirLock() {
    if (held_) {
        std::error_code ignored;
        std::filesystem::remove(path_, ignored);
    }
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

Datadir::Datadir(std::filesystem::path root, DatadirConfig config)
    : root_(std::move(root)), config_(config) {
    std::filesystem::create_directories(root_);

    auto config_path = root_ / "config.json";
    if (std::filesystem::exists(config_path)) {
        nlohmann::json doc = nlohmann::json::parse(read_file(config_path));
        config_.nodes = doc.at("nodes").get<std::size_t>();
        config_.price_cents = doc.at("price_cents").get<std::int64_t>();
        config_.seed = doc.at("seed").get<std::uint64_t>();
    } else {
        write_file(config_path, nlohmann::json{{"nodes", config_.nodes},
                                               {"price_cents", config_.price_cents},
                                               {"seed", config_.seed}}
                                    .dump());
    }

    SimNetwork::Config net_config;
    net_config.node_count = config_.nodes;
    net_config.seed = config_.seed;
    net_config.price_cents = config_.price_cents;
    net_ = std::make_unique<SimNetwork>(net_config);

    replay_logs();
    seed_chunks();

    auto state_path = root_ / "state.json";
    if (std::filesystem::exists(state_path)) {
        nlohmann::json doc = nlohmann::json::parse(read_file(state_path));
        net_->advance_clock(doc.at("clock").get<std::int64_t>());
    }

    install_hooks();
}

void Datadir::replay_logs() {
    auto chain_log = root_ / "chain.log";
    if (std::filesystem::exists(chain_log)) {
        std::ifstream in(chain_log);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            net_->adopt_logged_block(block_from_json(line));
        }
    }
    auto side_log = root_ / "sidechain.log";
    if (std::filesystem::exists(side_log)) {
        std::ifstream in(side_log);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            net_->adopt_logged_side_block(side_block_from_json(line));
        }
    }
}

void Datadir::seed_chunks() {
    for (const auto& [root, manifest] : net_->manifests()) {
        for (const Hash32& hash : manifest.chunk_hashes) {
            auto path = root_ / "chunks" / hash.hex();
            if (!std::filesystem::exists(path)) continue;  // surfaces later as unavailable
            net_->seed_chunk(read_chunk_file(root_, hash));
        }
    }
}

void Datadir::install_hooks() {
    net_->on_block = [this](const ParentBlock& block) {
        append_line(root_ / "chain.log", block_to_json(block));
    };
    net_->on_side_block = [this](const SideBlock& block) {
        append_line(root_ / "sidechain.log", side_block_to_json(block));
    };
    net_->on_chunk = [this](const Chunk& chunk) { write_chunk_file(root_, chunk); };
    net_->on_manifest = [this](const FileManifest& manifest) {
        write_manifest_file(root_, manifest);
    };
}

void Datadir::append_line(const std::filesystem::path& file, const std::string& line) {
    std::ofstream out(file, std::ios::binary | std::ios::app);
    out << line << '\n';
    if (!out) throw Error("cannot append to " + file.string());
}

void Datadir::checkpoint() {
    write_file(root_ / "state.json", nlohmann::json{{"clock", net_->now()}}.dump());
}

}  // namespace tunechain
