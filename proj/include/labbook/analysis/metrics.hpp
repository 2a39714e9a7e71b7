#pragma once

#include <cstdint>
#include <filesystem>

#include "labbook/canonical_json.hpp"
#include "labbook/provstore/repository.hpp"

namespace labbook::analysis {

/// Behavioural counters of one provenance repository.
struct UsageMetrics {
  std::int64_t mindmap_saves = 0;
  // States placed on the mind map: those on HEAD's map, and every distinct
  // (node, commit) pair that any saved map ever held.
  std::int64_t mindmap_states_final = 0;
  std::int64_t mindmap_states_cumulative = 0;
  // Adds, removes, and redos that changed the measurement list.
  std::int64_t measurement_interactions = 0;
  std::int64_t annotated_states = 0;
  std::int64_t annotation_chars = 0; // Unicode code points

  friend bool operator==(const UsageMetrics&, const UsageMetrics&) = default;
};

// Counts over every commit reachable from any ref, each once.
UsageMetrics repo_metrics(const provstore::Repository& repo);
// Opens and verifies first. Throws Error(repo_error) for a corrupt repository.
UsageMetrics repo_metrics(const std::filesystem::path& path);

Json metrics_to_json(const UsageMetrics& metrics);

// Code points in valid UTF-8; invalid bytes count one each.
std::int64_t count_code_points(std::string_view text) noexcept;

} // namespace labbook::analysis
