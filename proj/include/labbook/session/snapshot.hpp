#pragma once

#include <map>
#include <string>
#include <vector>

#include "labbook/provstore/objects.hpp"
#include "labbook/session/mindmap.hpp"
#include "labbook/vftsim/geometry.hpp"

namespace labbook::provstore {
class Repository;
}

namespace labbook::session {

inline constexpr const char* kCameraFile = "camera.json";
inline constexpr const char* kMeasurementsFile = "measurements.json";
inline constexpr const char* kMindMapFile = "mindmap.json";
inline constexpr const char* kNotesFile = "notes.md";
inline constexpr const char* kScreenshotFile = "screenshot.png";

inline constexpr std::size_t kMaxScreenshotBytes = std::size_t{4} << 20;

/// The complete tool state stored in one commit.
struct Snapshot {
  std::vector<vftsim::Measurement> measurements;
  vftsim::CameraPose camera;
  std::string screenshot; // PNG bytes; empty means "no capture" (root commit)
  MindMap mindmap;
  std::string notes;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

using SnapshotFiles = std::map<std::string, std::string>;

// Canonical bytes of all five files.
SnapshotFiles snapshot_files(const Snapshot& snapshot);
// Throws Error(invalid_snapshot) on a missing/extra file or a bad payload.
Snapshot snapshot_from_files(const SnapshotFiles& files);

// Tree id the snapshot would get, computed without a repository.
provstore::ObjectId snapshot_tree_id(const Snapshot& snapshot);
provstore::Tree snapshot_tree(const Snapshot& snapshot);

provstore::ObjectId write_snapshot(provstore::Repository& repo, const Snapshot& snapshot);
SnapshotFiles read_snapshot_files(const provstore::Repository& repo, const provstore::ObjectId& tree);
Snapshot read_snapshot(const provstore::Repository& repo, const provstore::ObjectId& tree);

// Empty screenshot or a PNG of at most 4 MiB. Throws Error(invalid_input).
void validate_screenshot(std::string_view png);

} // namespace labbook::session
