#include "strata/session_registry.hpp"

#include "strata/error.hpp"
#include "strata/persistence.hpp"

#include <spdlog/spdlog.h>

namespace strata {

Session::Session(std::string user_id, MemoryState state)
    : user_id_(std::move(user_id)), committed_(std::make_shared<const MemoryState>(std::move(state))) {}

std::shared_ptr<const MemoryState> Session::committed() const {
    std::lock_guard lock(publish_mutex_);
    return committed_;
}

SessionRegistry::SessionRegistry(Config config, std::filesystem::path data_dir)
    : config_(std::move(config)), data_dir_(std::move(data_dir)) {}

std::shared_ptr<Session> SessionRegistry::acquire(const std::string& user_id) {
    if (!is_valid_user_id(user_id)) {
        throw_invalid_argument("invalid user id '" + user_id + "': expected 1-128 characters of [A-Za-z0-9_.-]");
    }
    std::lock_guard lock(mutex_);
    if (auto it = sessions_.find(user_id); it != sessions_.end()) return it->second;

    const auto file = snapshot_path(data_dir_, user_id);
    MemoryState state;
    std::error_code ec;
    if (std::filesystem::exists(file, ec)) {
        MemorySnapshot snapshot = load(file);
        if (snapshot.state.user_id != user_id) {
            throw Error(ErrorCode::corruption, file.string() + ": snapshot belongs to user '" +
                                                   snapshot.state.user_id + "'");
        }
        check_invariants(snapshot.state, &config_);
        state = std::move(snapshot.state);
        spdlog::debug("loaded memory for user {} from {}", user_id, file.string());
    } else {
        state = MemoryState::empty(user_id, config_);
    }
    auto session = std::make_shared<Session>(user_id, std::move(state));
    sessions_.emplace(user_id, session);
    return session;
}

std::shared_ptr<const MemoryState> SessionRegistry::read(const std::string& user_id) {
    return acquire(user_id)->committed();
}

void SessionRegistry::write(const std::string& user_id, const WriteFn& fn) {
    for (;;) {
        auto session = acquire(user_id);
        std::unique_lock writer(session->writer_mutex_);
        if (session->wiped_) continue;  // wiped while we queued; start over from a fresh session
        auto next = fn(*session->committed());
        if (next) {
            auto published = std::make_shared<const MemoryState>(std::move(*next));
            std::lock_guard publish(session->publish_mutex_);
            session->committed_ = std::move(published);
        }
        return;
    }
}

bool SessionRegistry::wipe(const std::string& user_id) {
    auto session = acquire(user_id);
    std::unique_lock writer(session->writer_mutex_);
    const bool existed = wipe_user(data_dir_, user_id);
    session->wiped_ = true;
    {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(user_id);
        if (it != sessions_.end() && it->second == session) sessions_.erase(it);
    }
    return existed;
}

std::size_t SessionRegistry::loaded_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

} // namespace strata
