#include "labbook/protocol/server.hpp"

namespace labbook::protocol {

namespace {

ServerOptions options_from(const Config& c) {
  ServerOptions o;
  o.repo_root = c.repo_root;
  o.author = c.author;
  o.clock = make_clock(c);
  return o;
}

} // namespace

Server::Server(const Config& config)
    : context_(options_from(config)), tool_(context_, config.bind, config.tool_port), http_(context_) {
  http_port_ = http_.bind(config.bind, config.http_port);
}

Server::~Server() { stop(); }

void Server::start() {
  tool_.start();
  http_.start();
}

void Server::stop() {
  if (stopped_) return;
  stopped_ = true;
  context_.shutdown();
  http_.stop();
  tool_.stop();
}

} // namespace labbook::protocol
