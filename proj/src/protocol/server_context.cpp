#include "labbook/protocol/server_context.hpp"

#include "labbook/error.hpp"

namespace labbook::protocol {

namespace fs = std::filesystem;

bool is_valid_repo_name(std::string_view name) noexcept {
  if (name.empty() || name.size() > 64 || name.front() == '.') return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
              c == '-';
    if (!ok) return false;
  }
  return true;
}

ServerContext::ServerContext(ServerOptions options) : options_(std::move(options)) {
  if (!options_.clock) options_.clock = std::make_shared<SystemClock>();
}

void ServerContext::open_repo(const std::string& name, bool create) {
  if (!is_valid_repo_name(name)) throw Error(Errc::invalid_name, "invalid repository name '" + name + "'");
  std::lock_guard lock(mu_);
  auto path = options_.repo_root / name;
  std::error_code ec;
  bool exists = fs::exists(path, ec);
  if (create && exists) throw Error(Errc::already_exists, "repository '" + name + "' already exists");
  if (!create && !exists) throw Error(Errc::not_found, "no repository named '" + name + "'");
  if (!create && session_ && repo_name_ == name) return;
  session::SessionOptions so;
  so.author = options_.author;
  so.clock = options_.clock;
  fs::create_directories(options_.repo_root, ec);
  auto s = session::Session::start(path, so);
  session_.emplace(std::move(s));
  repo_name_ = name;
}

void ServerContext::bind_client(ClientLink* client, const std::string& name, bool create) {
  {
    std::lock_guard lock(mu_);
    if (client_ && client_ != client) throw Error(Errc::busy, "another visualization client is connected");
    client_ = client;
  }
  try {
    open_repo(name, create);
  } catch (...) {
    release_client(client);
    throw;
  }
  notify_graph_changed();
}

void ServerContext::release_client(ClientLink* client) {
  std::lock_guard lock(mu_);
  if (client_ == client) client_ = nullptr;
}

bool ServerContext::has_client() const {
  std::lock_guard lock(mu_);
  return client_ != nullptr;
}

std::optional<std::string> ServerContext::repo_name() const {
  std::lock_guard lock(mu_);
  return repo_name_;
}

void ServerContext::notify_graph_changed() {
  {
    std::lock_guard lock(events_mu_);
    ++version_;
  }
  events_cv_.notify_all();
}

std::uint64_t ServerContext::graph_version() const {
  std::lock_guard lock(events_mu_);
  return version_;
}

std::uint64_t ServerContext::wait_graph_change(std::uint64_t seen, std::chrono::milliseconds timeout) {
  std::unique_lock lock(events_mu_);
  events_cv_.wait_for(lock, timeout, [&] { return version_ != seen || shutdown_; });
  return version_;
}

void ServerContext::shutdown() {
  {
    std::lock_guard lock(events_mu_);
    shutdown_ = true;
  }
  events_cv_.notify_all();
}

bool ServerContext::shutting_down() const {
  std::lock_guard lock(events_mu_);
  return shutdown_;
}

} // namespace labbook::protocol
