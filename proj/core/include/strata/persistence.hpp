#pragma once

#include "strata/memory_state.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace strata {

inline constexpr int kSnapshotVersion = 1;

struct MemorySnapshot {
    int version = kSnapshotVersion;
    MemoryState state;
    Timestamp saved_at = 0;

    friend bool operator==(const MemorySnapshot&, const MemorySnapshot&) = default;
};

// Non-empty, at most 128 bytes of [A-Za-z0-9_.-], and not "." or "..".
bool is_valid_user_id(std::string_view user_id);

std::filesystem::path user_directory(const std::filesystem::path& data_dir, std::string_view user_id);
std::filesystem::path snapshot_path(const std::filesystem::path& data_dir, std::string_view user_id);
std::filesystem::path archive_path(const std::filesystem::path& data_dir, std::string_view user_id);

// Canonical bytes of a snapshot; identical states encode identically.
std::string encode_snapshot(const MemorySnapshot& snapshot);

// Parses and re-validates a snapshot. Throws Error(parse) with a location,
// Error(version) for unsupported versions, Error(corruption) for invariant
// breaches.
MemorySnapshot decode_snapshot(std::string_view bytes, const std::string& source = "<memory>");

// Writes <data_dir>/<user_id>/memory.json atomically (temp file, fsync,
// rename). Throws Error(io); a failed save never leaves a partial file visible.
std::filesystem::path save(const MemorySnapshot& snapshot, const std::filesystem::path& data_dir);

// Throws Error(not_found) if the file is missing.
MemorySnapshot load(const std::filesystem::path& file);

// Appends one canonical JSON line to <data_dir>/<user_id>/archive.jsonl.
std::filesystem::path archive_segment(const Segment& segment, std::string_view user_id,
                                      const std::filesystem::path& data_dir);

std::vector<Segment> read_archive(const std::filesystem::path& file);

// Removes the user's directory. Returns false if nothing existed.
bool wipe_user(const std::filesystem::path& data_dir, std::string_view user_id);

} // namespace strata
