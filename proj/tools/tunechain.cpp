// tunechain: registration, upload, paid download, access control, revenue
// reporting and chain exploration over a persistent datadir.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tunechain/chain.hpp"
#include "tunechain/datadir.hpp"
#include "tunechain/errors.hpp"
#include "tunechain/fingerprint.hpp"
#include "tunechain/netsim.hpp"
#include "tunechain/sha256.hpp"

namespace {

using namespace tunechain;

// Exit codes; the sole machine-readable success signal.
enum ExitCode : int {
    kOk = 0,
    kLoginRevoked = 1,
    kAlreadyRegistered = 2,
    kCopyrightViolation = 3,
    kUnknownRoot = 4,
    kIntegrityFailure = 5,
    kContractRevert = 6,
    kHeightOutOfRange = 7,
    kUsage = 64,
    kUnsupportedAudio = 65,
    kUnreadableInput = 66,
    kInternalError = 70,
    kDatadirLocked = 75,
};

struct InputUnreadable : Error {
    using Error::Error;
};

Bytes read_input_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputUnreadable("cannot read " + path);
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string format_cents(std::int64_t cents) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "$%lld.%02lld", static_cast<long long>(cents / 100),
                  static_cast<long long>(cents % 100));
    return buf;
}

// "21-Feb-2020 17:15:11pm", mirroring the report rendering: 24-hour clock
// with an am/pm suffix.
std::string format_report_date(std::int64_t utc_seconds) {
    std::int64_t days = utc_seconds / 86400;
    std::int64_t rem = utc_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    // Civil-from-days (Howard Hinnant's algorithm).
    std::int64_t z = days + 719468;
    std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    std::int64_t doe = z - era * 146097;
    std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = yoe + era * 400;
    std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    std::int64_t mp = (5 * doy + 2) / 153;
    std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
    std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) y += 1;

    static const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    int hour = static_cast<int>(rem / 3600);
    int minute = static_cast<int>(rem / 60 % 60);
    int second = static_cast<int>(rem % 60);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%02lld-%s-%04lld %02d:%02d:%02d%s", static_cast<long long>(d),
                  kMonths[m - 1], static_cast<long long>(y), hour, minute, second,
                  hour < 12 ? "am" : "pm");
    return buf;
}

Address parse_address(const std::string& hex) {
    if (hex.size() != 40) throw InvalidInput("address must be 40 hex chars");
    return Address::parse_hex(hex);
}

Hash32 parse_root(const std::string& hex) {
    if (hex.size() != 64) throw InvalidInput("root must be 64 hex chars");
    return Hash32::parse_hex(hex);
}

// --- commands ------------------------------------------------------------

int cmd_register(Datadir& dir, const std::string& email, const std::string& password) {
    try {
        Address addr = dir.network().register_user(email, password);
        dir.network().consensus_round();
        std::cout << addr.hex() << "\n";
        return kOk;
    } catch (const AlreadyRegistered&) {
        std::cout << "already registered\n";
        return kAlreadyRegistered;
    }
}

int cmd_login(Datadir& dir, const std::string& email, const std::string& password) {
    AuthResult result = dir.network().login(email, password);
    if (!result.granted) {
        std::cout << "revoked\n";
        return kLoginRevoked;
    }
    std::cout << result.address.hex() << "\n";
    return kOk;
}

int cmd_upload(Datadir& dir, const std::string& as, const std::string& file,
               const std::string& author, const std::string& title) {
    Address uploader = parse_address(as);
    Bytes bytes = read_input_file(file);
    StoreResult result = dir.network().store_music(uploader, bytes, author, title);
    if (result.copyright_violation) {
        std::cout << "copyright violation\n";
        return kCopyrightViolation;
    }
    dir.network().consensus_round();

    std::string meta = nlohmann::json{{"author", author},
                                      {"date", result.uploaded_at},
                                      {"title", title}}
                           .dump();
    std::cout << "meta_hash: " << sha256(meta).hex() << "\n";
    std::cout << "file_hash: " << result.manifest_root.hex() << "\n";
    return kOk;
}

int cmd_download(Datadir& dir, const std::string& as, const std::string& root_hex,
                 const std::string& out_path) {
    Address requester = parse_address(as);
    Hash32 root = parse_root(root_hex);
    DownloadReceipt receipt = dir.network().download_file(requester, root);
    dir.network().consensus_round();

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(receipt.bytes.data()),
              static_cast<std::streamsize>(receipt.bytes.size()));
    if (!out) throw Error("cannot write " + out_path);

    std::cout << "root: " << root.hex() << "\n";
    std::cout << "price: " << format_cents(receipt.price_cents) << "\n";
    std::cout << "downloads: " << receipt.downloads << "\n";
    std::cout << "receipt: " << receipt.grant.receipt_id << "\n";
    return kOk;
}

int cmd_grant(Datadir& dir, bool revoke, const std::string& as, const std::string& addr_hex,
              const std::string& root_hex) {
    Address owner = parse_address(as);
    Address addr = parse_address(addr_hex);
    Hash32 root = parse_root(root_hex);
    try {
        if (revoke)
            dir.network().revoke(owner, addr, root);
        else
            dir.network().grant(owner, addr, root);
    } catch (const Revert& revert) {
        std::cout << revert.reason() << "\n";
        return kContractRevert;
    }
    dir.network().consensus_round();
    std::cout << (revoke ? "revoked " : "granted ") << addr.hex() << " on " << root.hex() << "\n";
    return kOk;
}

int cmd_revenue(Datadir& dir) {
    std::printf("%-3s %-16s %-28s %-24s %9s %12s\n", "#", "Author", "Title", "Date Uploaded",
                "Downloads", "Revenue");
    int index = 1;
    for (const RevenueRow& row : revenue_report(dir.network().canonical().ledger)) {
        std::printf("%-3d %-16s %-28s %-24s %9llu %12s\n", index++, row.author.c_str(),
                    row.title.c_str(), format_report_date(row.uploaded_at).c_str(),
                    static_cast<unsigned long long>(row.downloads),
                    format_cents(row.revenue_cents).c_str());
    }
    return kOk;
}

int cmd_explore(Datadir& dir, std::optional<std::int64_t> height, bool violations) {
    if (violations == height.has_value()) {
        std::cerr << "explore: pass exactly one of --height or --violations\n";
        return kUsage;
    }
    if (violations) {
        nlohmann::json list = nlohmann::json::array();
        for (const SideBlock& block : dir.network().canonical().side_chain.blocks) {
            for (const ViolationTx& v : block.violations) {
                list.push_back({{"nid", v.nid.hex()},
                                {"tov", v.tov},
                                {"uid", v.uid.hex()},
                                {"vt", v.vt}});
            }
        }
        std::cout << list.dump() << "\n";
        return kOk;
    }
    const auto& blocks = dir.network().canonical().chain.blocks;
    if (*height < 0 || static_cast<std::size_t>(*height) >= blocks.size()) {
        std::cerr << "height " << *height << " out of range (chain height " << blocks.size()
                  << ")\n";
        return kHeightOutOfRange;
    }
    std::cout << block_to_json(blocks[static_cast<std::size_t>(*height)]) << "\n";
    return kOk;
}

int cmd_fingerprint(const std::string& file) {
    Bytes bytes = read_input_file(file);
    std::cout << music_fingerprint(read_wav(bytes)).value << "\n";
    return kOk;
}

// Scenario files: a canonical-JSON list of {args, op} commands.
void scenario_append(const std::string& path, const std::string& op, nlohmann::json args) {
    nlohmann::json list = nlohmann::json::array();
    std::ifstream in(path, std::ios::binary);
    if (in) {
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (!text.empty()) list = nlohmann::json::parse(text);
    }
    list.push_back({{"args", std::move(args)}, {"op", op}});
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << list.dump();
}

int run_scenario_op(Datadir& dir, const std::string& op, const nlohmann::json& args) {
    if (op == "register")
        return cmd_register(dir, args.at("email"), args.at("password"));
    if (op == "login") return cmd_login(dir, args.at("email"), args.at("password"));
    if (op == "upload")
        return cmd_upload(dir, args.at("as"), args.at("file"), args.at("author"),
                          args.at("title"));
    if (op == "download") return cmd_download(dir, args.at("as"), args.at("root"), args.at("out"));
    if (op == "grant") return cmd_grant(dir, false, args.at("as"), args.at("addr"), args.at("root"));
    if (op == "revoke") return cmd_grant(dir, true, args.at("as"), args.at("addr"), args.at("root"));
    if (op == "revenue") return cmd_revenue(dir);
    if (op == "fingerprint") return cmd_fingerprint(args.at("file"));
    if (op == "explore") {
        std::optional<std::int64_t> height;
        if (args.contains("height")) height = args.at("height").get<std::int64_t>();
        return cmd_explore(dir, height, args.value("violations", false));
    }
    if (op == "advance_clock") {
        dir.network().advance_clock(args.at("to").get<std::int64_t>());
        return kOk;
    }
    throw Error("unknown scenario op '" + op + "'");
}

int cmd_replay(Datadir& dir, const std::string& scenario_path) {
    nlohmann::json list = nlohmann::json::parse(read_input_file(scenario_path));
    for (const auto& item : list) {
        const std::string op = item.at("op").get<std::string>();
        int code = run_scenario_op(dir, op, item.at("args"));
        dir.checkpoint();
        std::cerr << "[replay] " << op << " -> exit " << code << "\n";
    }
    return kOk;
}

int map_error_exit(const std::exception& err) {
    if (dynamic_cast<const Locked*>(&err)) return kDatadirLocked;
    if (dynamic_cast<const InputUnreadable*>(&err)) return kUnreadableInput;
    if (dynamic_cast<const InvalidCredential*>(&err)) return kUsage;
    if (dynamic_cast<const UnregisteredUser*>(&err)) return kUsage;
    if (dynamic_cast<const InvalidInput*>(&err)) return kUsage;
    if (dynamic_cast<const UnsupportedFormat*>(&err)) return kUnsupportedAudio;
    if (dynamic_cast<const MalformedFile*>(&err)) return kUnsupportedAudio;
    if (dynamic_cast<const NotFound*>(&err)) return kUnknownRoot;
    if (dynamic_cast<const IntegrityError*>(&err)) return kIntegrityFailure;
    if (dynamic_cast<const ChunkUnavailable*>(&err)) return kIntegrityFailure;
    if (dynamic_cast<const AccessDenied*>(&err)) return kContractRevert;
    if (dynamic_cast<const Revert*>(&err)) return kContractRevert;
    return kInternalError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blockchain-backed music sharing simulator"};
    app.require_subcommand(1);

    std::string datadir_path = "./tunedata";
    std::uint64_t seed = 42;
    std::int64_t price_cents = 137;
    std::size_t nodes = 4;
    std::string record_path;
    app.add_option("--datadir", datadir_path, "state directory")->capture_default_str();
    app.add_option("--seed", seed, "deterministic seed (applies when the datadir is created)")
        ->capture_default_str();
    app.add_option("--price-cents", price_cents, "per-download price in cents")
        ->capture_default_str();
    app.add_option("--nodes", nodes, "simulated node count")->capture_default_str();
    app.add_option("--record", record_path, "append executed commands to a scenario file");

    std::string email, password, as, file, author, title, root, out, addr, scenario;
    std::optional<std::int64_t> height;
    bool violations = false;

    auto* reg = app.add_subcommand("register", "register a new user");
    reg->add_option("email", email)->required();
    reg->add_option("password", password)->required();

    auto* login = app.add_subcommand("login", "authenticate a user");
    login->add_option("email", email)->required();
    login->add_option("password", password)->required();

    auto* upload = app.add_subcommand("upload", "fingerprint, chunk and register a WAV file");
    upload->add_option("--as", as, "uploader address")->required();
    upload->add_option("--author", author)->required();
    upload->add_option("--title", title)->required();
    upload->add_option("file", file)->required();

    auto* download = app.add_subcommand("download", "pay for and download a file");
    download->add_option("--as", as, "requester address")->required();
    download->add_option("--out", out, "output path")->required();
    download->add_option("root", root, "manifest root hash")->required();

    auto* grant = app.add_subcommand("grant", "grant access (owner only)");
    grant->add_option("--as", as, "owner address")->required();
    grant->add_option("addr", addr)->required();
    grant->add_option("root", root)->required();

    auto* revoke = app.add_subcommand("revoke", "revoke access (owner only)");
    revoke->add_option("--as", as, "owner address")->required();
    revoke->add_option("addr", addr)->required();
    revoke->add_option("root", root)->required();

    auto* revenue = app.add_subcommand("revenue", "print the revenue table");

    auto* explore = app.add_subcommand("explore", "inspect blocks or violations");
    explore->add_option("--height", height, "parent block height");
    explore->add_flag("--violations", violations, "list side-chain violations");

    auto* fingerprint_cmd = app.add_subcommand("fingerprint", "print a WAV file's fingerprint");
    fingerprint_cmd->add_option("file", file)->required();

    auto* replay = app.add_subcommand("replay", "execute a scenario file");
    replay->add_option("scenario", scenario)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    // fingerprint is stateless; everything else works on the datadir.
    try {
        if (fingerprint_cmd->parsed()) return cmd_fingerprint(file);

        DirLock lock{datadir_path};
        Datadir dir{datadir_path, DatadirConfig{nodes, price_cents, seed}};

        int code = kInternalError;
        std::string op;
        nlohmann::json args;
        if (reg->parsed()) {
            op = "register";
            args = {{"email", email}, {"password", password}};
            code = cmd_register(dir, email, password);
        } else if (login->parsed()) {
            op = "login";
            args = {{"email", email}, {"password", password}};
            code = cmd_login(dir, email, password);
        } else if (upload->parsed()) {
            op = "upload";
            args = {{"as", as}, {"author", author}, {"file", file}, {"title", title}};
            code = cmd_upload(dir, as, file, author, title);
        } else if (download->parsed()) {
            op = "download";
            args = {{"as", as}, {"out", out}, {"root", root}};
            code = cmd_download(dir, as, root, out);
        } else if (grant->parsed()) {
            op = "grant";
            args = {{"addr", addr}, {"as", as}, {"root", root}};
            code = cmd_grant(dir, false, as, addr, root);
        } else if (revoke->parsed()) {
            op = "revoke";
            args = {{"addr", addr}, {"as", as}, {"root", root}};
            code = cmd_grant(dir, true, as, addr, root);
        } else if (revenue->parsed()) {
            op = "revenue";
            args = nlohmann::json::object();
            code = cmd_revenue(dir);
        } else if (explore->parsed()) {
            op = "explore";
            args = nlohmann::json::object();
            if (height) args["height"] = *height;
            if (violations) args["violations"] = true;
            code = cmd_explore(dir, height, violations);
        } else if (replay->parsed()) {
            code = cmd_replay(dir, scenario);
        }

        dir.checkpoint();
        if (!record_path.empty() && !op.empty()) scenario_append(record_path, op, args);
        return code;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return map_error_exit(err);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kInternalError;
    }
}
