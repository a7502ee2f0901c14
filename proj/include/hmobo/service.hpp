#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "hmobo/session.hpp"

namespace httplib {
class Server;
}

namespace hmobo {

/// Sessions backed by `<data_dir>/<id>.jsonl`. Each session has a single
/// writer at a time; unknown ids are recovered from disk on first access.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path data_dir, Clock clock = utc_now);

    std::string create(Mode mode, const SessionConfig& cfg);

    /// Runs fn(Session&) under the session's lock. Throws NotFound.
    template <typename Fn>
    auto with_session(const std::string& id, Fn&& fn) {
        auto entry = find(id);
        std::lock_guard lock(entry->mutex);
        return fn(entry->session);
    }

    const std::filesystem::path& data_dir() const { return data_dir_; }

private:
    struct Entry {
        explicit Entry(Session s) : session(std::move(s)) {}
        std::mutex mutex;
        Session session;
    };

    std::shared_ptr<Entry> find(const std::string& id);
    Session::Sink file_sink(const std::string& id) const;
    std::string fresh_id();

    std::filesystem::path data_dir_;
    Clock clock_;
    std::mutex index_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

/// HTTP status for a library error.
int http_status(ErrorKind kind);

/// Installs the /api/sessions routes on `server`.
void register_routes(httplib::Server& server, SessionStore& store);

}  // namespace hmobo
