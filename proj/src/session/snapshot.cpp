#include "labbook/session/snapshot.hpp"

#include "labbook/encoding.hpp"
#include "labbook/error.hpp"
#include "labbook/provstore/repository.hpp"
#include "labbook/vftsim/measurement_json.hpp"
#include "labbook/vftsim/png.hpp"

namespace labbook::session {

using provstore::ObjectId;
using provstore::ObjectKind;

SnapshotFiles snapshot_files(const Snapshot& s) {
  return {
      {kCameraFile, canonical_dump(vftsim::camera_to_json(s.camera))},
      {kMeasurementsFile, canonical_dump(vftsim::measurements_to_json(s.measurements))},
      {kMindMapFile, canonical_dump(mindmap_to_json(s.mindmap))},
      {kNotesFile, s.notes},
      {kScreenshotFile, s.screenshot},
  };
}

Snapshot snapshot_from_files(const SnapshotFiles& files) {
  static const char* kNames[] = {kCameraFile, kMeasurementsFile, kMindMapFile, kNotesFile, kScreenshotFile};
  for (const char* name : kNames) {
    if (!files.contains(name)) throw Error(Errc::invalid_snapshot, std::string("snapshot lacks ") + name);
  }
  if (files.size() != std::size(kNames)) throw Error(Errc::invalid_snapshot, "snapshot has unexpected entries");
  Snapshot s;
  try {
    s.camera = vftsim::camera_from_json(parse_json(files.at(kCameraFile), kCameraFile));
    s.measurements = vftsim::measurements_from_json(parse_json(files.at(kMeasurementsFile), kMeasurementsFile));
    s.mindmap = mindmap_from_json(parse_json(files.at(kMindMapFile), kMindMapFile));
    validate_screenshot(files.at(kScreenshotFile));
  } catch (const Error& e) {
    throw Error(Errc::invalid_snapshot, e.what());
  }
  s.notes = files.at(kNotesFile);
  if (!is_valid_utf8(s.notes)) throw Error(Errc::invalid_snapshot, "notes.md is not valid UTF-8");
  s.screenshot = files.at(kScreenshotFile);
  return s;
}

provstore::Tree snapshot_tree(const Snapshot& snapshot) {
  provstore::Tree tree;
  for (const auto& [name, bytes] : snapshot_files(snapshot)) {
    tree.entries.push_back({name, ObjectKind::blob, provstore::hash_object(ObjectKind::blob, bytes)});
  }
  return tree;
}

ObjectId snapshot_tree_id(const Snapshot& snapshot) {
  return provstore::hash_object(ObjectKind::tree, provstore::serialize_tree(snapshot_tree(snapshot)));
}

ObjectId write_snapshot(provstore::Repository& repo, const Snapshot& snapshot) {
  provstore::Tree tree;
  for (const auto& [name, bytes] : snapshot_files(snapshot)) {
    tree.entries.push_back({name, ObjectKind::blob, repo.put_blob(bytes)});
  }
  return repo.put_tree(tree);
}

SnapshotFiles read_snapshot_files(const provstore::Repository& repo, const ObjectId& tree_id) {
  SnapshotFiles files;
  for (const auto& e : repo.get_tree(tree_id).entries) {
    if (e.kind != ObjectKind::blob) throw Error(Errc::invalid_snapshot, "snapshot entry " + e.name + " is not a file");
    files.emplace(e.name, repo.get_blob(e.id));
  }
  return files;
}

Snapshot read_snapshot(const provstore::Repository& repo, const ObjectId& tree) {
  return snapshot_from_files(read_snapshot_files(repo, tree));
}

void validate_screenshot(std::string_view png) {
  if (png.empty()) return;
  if (png.size() > kMaxScreenshotBytes) throw Error(Errc::invalid_input, "screenshot exceeds 4 MiB");
  vftsim::inspect_png(png);
}

} // namespace labbook::session
