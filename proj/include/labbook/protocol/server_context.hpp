#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "labbook/canonical_json.hpp"
#include "labbook/error.hpp"
#include "labbook/session/session.hpp"

namespace labbook::protocol {

/// The connected visualization client, as seen by the shared context.
class ClientLink {
public:
  virtual ~ClientLink() = default;
  // Called with the context lock held.
  virtual void push(const std::string& type, Json payload) = 0;
};

struct ServerOptions {
  std::filesystem::path repo_root;
  std::string author = "labbook";
  std::shared_ptr<Clock> clock;
};

// Repository names map to directories below the repo root.
bool is_valid_repo_name(std::string_view name) noexcept;

/// State shared by tool connections and HTTP handlers: one open session,
/// at most one owning tool connection, and a change counter for event
/// streams. Every session command runs under one lock.
class ServerContext {
public:
  explicit ServerContext(ServerOptions options);

  const ServerOptions& options() const noexcept { return options_; }

  // Opens (or creates) `name` as the current session; reuses it when it is
  // already open. Throws Error(invalid_name|already_exists|not_found|repo_error).
  void open_repo(const std::string& name, bool create);
  // Claims the session for `client`, opening the repo first. Throws
  // Error(busy) if another connection owns it.
  void bind_client(ClientLink* client, const std::string& name, bool create);
  void release_client(ClientLink* client);
  bool has_client() const;

  std::optional<std::string> repo_name() const;

  // Runs `fn(session)` under the lock. Throws Error(no_session) when no
  // repository is open.
  template <class F>
  auto with_session(F&& fn) {
    std::lock_guard lock(mu_);
    if (!session_) throw Error(Errc::no_session, "no repository is open");
    return fn(*session_);
  }
  // As with_session, also handing over the owning client (may be null).
  template <class F>
  auto with_session_and_client(F&& fn) {
    std::lock_guard lock(mu_);
    if (!session_) throw Error(Errc::no_session, "no repository is open");
    return fn(*session_, client_);
  }

  // Change notifications for event streams.
  void notify_graph_changed();
  std::uint64_t graph_version() const;
  // Returns the current version once it differs from `seen`, the timeout
  // passes, or shutdown begins.
  std::uint64_t wait_graph_change(std::uint64_t seen, std::chrono::milliseconds timeout);
  void shutdown();
  bool shutting_down() const;

private:
  ServerOptions options_;
  mutable std::mutex mu_;
  std::optional<session::Session> session_;
  std::optional<std::string> repo_name_;
  ClientLink* client_ = nullptr;

  mutable std::mutex events_mu_;
  std::condition_variable events_cv_;
  std::uint64_t version_ = 0;
  bool shutdown_ = false;
};

} // namespace labbook::protocol
