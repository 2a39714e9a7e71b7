#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "labbook/analysis/metrics.hpp"
#include "labbook/protocol/config.hpp"

namespace labbook::cli {

struct DemoOptions {
  protocol::Config config;        // ports are forced to 0; repo_root is the work dir
  std::filesystem::path bundle = "labbook-demo.zip";
  std::optional<std::filesystem::path> work_dir; // kept when given, else a temp dir
  bool echo_transcript = false;
};

struct DemoReport {
  std::size_t commits = 0;
  std::size_t branches = 0;
  std::size_t bundle_bytes = 0;
  std::string bundle_sha1;
  analysis::UsageMetrics metrics;
};

// Serves on ephemeral ports in-process, drives the built-in survey script
// through the simulator, annotates, edits the mind map and notes, redoes one
// state over HTTP, then exports the bundle and reads the metrics back.
DemoReport run_demo(const DemoOptions& options);

extern const char* const kDemoScript;

} // namespace labbook::cli
