#pragma once

#include "strata/config.hpp"
#include "strata/memory_state.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace strata {

// One user's memory. Writers serialize on writer_mutex and publish a new
// immutable state; readers take the latest published state without waiting
// for writers.
class Session {
public:
    Session(std::string user_id, MemoryState state);

    const std::string& user_id() const noexcept { return user_id_; }

    std::shared_ptr<const MemoryState> committed() const;

private:
    friend class SessionRegistry;

    std::string user_id_;
    std::mutex writer_mutex_;
    bool wiped_ = false;  // guarded by writer_mutex_
    mutable std::mutex publish_mutex_;
    std::shared_ptr<const MemoryState> committed_;
};

// Owns the in-memory state of every user seen since start-up. States are
// loaded lazily from <data_dir>/<user>/memory.json; unknown users start empty.
class SessionRegistry {
public:
    SessionRegistry(Config config, std::filesystem::path data_dir);

    const std::filesystem::path& data_dir() const noexcept { return data_dir_; }

    // Throws Error(invalid_argument) for an unsafe user id and propagates
    // load errors (parse, version, corruption) for an unreadable snapshot.
    std::shared_ptr<Session> acquire(const std::string& user_id);

    // Latest committed state, without taking the user's writer lock.
    std::shared_ptr<const MemoryState> read(const std::string& user_id);

    // Runs fn with exclusive write access. fn returns the new state to publish,
    // or nullopt to leave the state untouched; if fn throws nothing is published.
    using WriteFn = std::function<std::optional<MemoryState>(const MemoryState&)>;
    void write(const std::string& user_id, const WriteFn& fn);

    // Removes the user from memory and disk. Returns false if neither existed.
    bool wipe(const std::string& user_id);

    std::size_t loaded_count() const;

private:
    Config config_;
    std::filesystem::path data_dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

} // namespace strata
