#include "strata/persistence.hpp"

#include "strata/error.hpp"
#include "strata/serialization.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace strata {
namespace fs = std::filesystem;
namespace {

[[noreturn]] void throw_io(const std::string& what) {
    throw Error(ErrorCode::io, what + ": " + std::strerror(errno));
}

void require_user_id(std::string_view user_id) {
    if (!is_valid_user_id(user_id)) throw_invalid_argument("invalid user id '" + std::string(user_id) + "'");
}

void write_all(int fd, std::string_view bytes, const fs::path& path) {
    while (!bytes.empty()) {
        const ssize_t n = ::write(fd, bytes.data(), bytes.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_io("write " + path.string());
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

void make_user_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
}

void fsync_directory(const fs::path& dir) {
    int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

} // namespace

bool is_valid_user_id(std::string_view user_id) {
    if (user_id.empty() || user_id.size() > 128 || user_id == "." || user_id == "..") return false;
    for (char c : user_id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

fs::path user_directory(const fs::path& data_dir, std::string_view user_id) {
    require_user_id(user_id);
    return data_dir / std::string(user_id);
}

fs::path snapshot_path(const fs::path& data_dir, std::string_view user_id) {
    return user_directory(data_dir, user_id) / "memory.json";
}

fs::path archive_path(const fs::path& data_dir, std::string_view user_id) {
    return user_directory(data_dir, user_id) / "archive.jsonl";
}

std::string encode_snapshot(const MemorySnapshot& snapshot) {
    const MemoryState& state = snapshot.state;
    Json doc;
    doc["version"] = snapshot.version;
    doc["user_id"] = state.user_id;
    doc["stm"] = to_json(state.stm);
    doc["mtm"] = to_json(state.mtm);
    doc["persona"] = to_json(state.persona);
    doc["saved_at"] = snapshot.saved_at;
    doc["next_id"] = state.ids.peek();
    doc["clock"] = state.clock;
    return doc.dump() + "\n";
}

MemorySnapshot decode_snapshot(std::string_view bytes, const std::string& source) {
    Json doc;
    try {
        doc = Json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::parse, source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::parse, source + ": $: expected an object");
    auto it = doc.find("version");
    if (it == doc.end() || !it->is_number_integer()) {
        throw Error(ErrorCode::parse, source + ": $.version: missing or not an integer");
    }
    const auto version = it->get<std::int64_t>();
    if (version != kSnapshotVersion) {
        throw Error(ErrorCode::version, source + ": unsupported snapshot version " + std::to_string(version) +
                                            " (supported: " + std::to_string(kSnapshotVersion) + ")");
    }

    auto need = [&](const char* key) -> const Json& {
        auto f = doc.find(key);
        if (f == doc.end()) throw Error(ErrorCode::parse, source + ": $: missing field \"" + key + "\"");
        return *f;
    };
    try {
        MemorySnapshot snapshot;
        snapshot.version = static_cast<int>(version);
        const Json& user = need("user_id");
        if (!user.is_string()) throw Error(ErrorCode::parse, "$.user_id: expected a string");
        snapshot.state.user_id = user.get<std::string>();
        snapshot.state.stm = stm_from_json(need("stm"), "$.stm");
        snapshot.state.mtm = mtm_from_json(need("mtm"), "$.mtm");
        snapshot.state.persona = persona_from_json(need("persona"), "$.persona");
        const Json& saved_at = need("saved_at");
        const Json& next_id = need("next_id");
        const Json& clock = need("clock");
        if (!saved_at.is_number_integer()) throw Error(ErrorCode::parse, "$.saved_at: expected an integer");
        if (!next_id.is_number_unsigned()) throw Error(ErrorCode::parse, "$.next_id: expected an unsigned integer");
        if (!clock.is_number_integer()) throw Error(ErrorCode::parse, "$.clock: expected an integer");
        snapshot.saved_at = saved_at.get<Timestamp>();
        snapshot.state.ids = IdSequence(next_id.get<std::uint64_t>());
        snapshot.state.clock = clock.get<Timestamp>();
        check_invariants(snapshot.state);
        return snapshot;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::parse || e.code() == ErrorCode::corruption) {
            throw Error(e.code(), source + ": " + e.what());
        }
        throw;
    }
}

fs::path save(const MemorySnapshot& snapshot, const fs::path& data_dir) {
    const fs::path dir = user_directory(data_dir, snapshot.state.user_id);
    const fs::path target = dir / "memory.json";
    const std::string bytes = encode_snapshot(snapshot);
    make_user_dir(dir);

    const fs::path temp = dir / ("memory.json.tmp." + std::to_string(::getpid()));
    int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw_io("open " + temp.string());
    try {
        write_all(fd, bytes, temp);
        if (::fsync(fd) != 0) throw_io("fsync " + temp.string());
    } catch (...) {
        ::close(fd);
        ::unlink(temp.c_str());
        throw;
    }
    if (::close(fd) != 0) {
        ::unlink(temp.c_str());
        throw_io("close " + temp.string());
    }
    if (::rename(temp.c_str(), target.c_str()) != 0) {
        const int saved = errno;
        ::unlink(temp.c_str());
        errno = saved;
        throw_io("rename " + temp.string());
    }
    fsync_directory(dir);
    return target;
}

MemorySnapshot load(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::not_found, "snapshot not found: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return decode_snapshot(buf.str(), file.string());
}

fs::path archive_segment(const Segment& segment, std::string_view user_id, const fs::path& data_dir) {
    if (segment.pages.empty()) throw_invalid_argument("cannot archive a segment without pages");
    const fs::path dir = user_directory(data_dir, user_id);
    make_user_dir(dir);
    const fs::path file = dir / "archive.jsonl";
    const std::string line = to_json(segment).dump() + "\n";
    int fd = ::open(file.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw_io("open " + file.string());
    try {
        write_all(fd, line, file);
    } catch (...) {
        ::close(fd);
        throw;
    }
    if (::close(fd) != 0) throw_io("close " + file.string());
    return file;
}

std::vector<Segment> read_archive(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::not_found, "archive not found: " + file.string());
    std::vector<Segment> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = file.string() + ":" + std::to_string(line_no);
        Json doc;
        try {
            doc = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::parse, where + ": " + e.what());
        }
        out.push_back(segment_from_json(doc, where + ":$"));
    }
    return out;
}

bool wipe_user(const fs::path& data_dir, std::string_view user_id) {
    std::error_code ec;
    const auto removed = fs::remove_all(user_directory(data_dir, user_id), ec);
    if (ec) throw Error(ErrorCode::io, "cannot remove user " + std::string(user_id) + ": " + ec.message());
    return removed > 0;
}

} // namespace strata
