#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labbook/provstore/object_id.hpp"
#include "labbook/time.hpp"

namespace labbook::provstore {

enum class ObjectKind { blob, tree, commit };

std::string_view kind_name(ObjectKind kind) noexcept;
std::optional<ObjectKind> parse_object_kind(std::string_view name) noexcept;

/// SHA-1 over the loose-object preimage "<kind> <len>\0<content>".
ObjectId hash_object(ObjectKind kind, std::string_view content);

struct TreeEntry {
  std::string name;
  ObjectKind kind = ObjectKind::blob; // blob or tree
  ObjectId id;

  friend bool operator==(const TreeEntry&, const TreeEntry&) = default;
};

struct Tree {
  std::vector<TreeEntry> entries;

  const TreeEntry* find(std::string_view name) const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

// Entries sorted bytewise by name, unique, non-empty, no '/' or NUL.
// Throws Error(invalid_input) describing the first violation.
void validate_tree(const Tree& tree);
std::string serialize_tree(const Tree& tree);
// Parses git tree format; does not check ordering. Throws Error(integrity_error).
Tree parse_tree(std::string_view content);

enum class CommitKind {
  session_start,
  measurement_added,
  measurement_removed,
  camera_moved,
  mindmap_update,
  notes_update,
  redo,
};

std::string_view kind_name(CommitKind kind) noexcept;
std::optional<CommitKind> parse_commit_kind(std::string_view name) noexcept;

/// Everything that goes into a commit object; the id is derived from it.
struct CommitData {
  ObjectId tree;
  std::vector<ObjectId> parents;
  std::string author;
  Timestamp timestamp;
  std::string message;
  CommitKind kind = CommitKind::session_start;

  friend bool operator==(const CommitData&, const CommitData&) = default;
};

struct StateCommit : CommitData {
  ObjectId id;
};

// Throws Error(invalid_input) for authors git cannot represent or >2 parents.
std::string serialize_commit(const CommitData& commit);
// Throws Error(integrity_error) on malformed content or missing Kind trailer.
CommitData parse_commit(std::string_view content);

struct Annotation {
  ObjectId commit;
  std::string author;
  Timestamp timestamp;
  std::string text;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

std::string format_annotation_record(const Annotation& annotation);
Annotation parse_annotation_record(const ObjectId& commit, std::string_view line);

} // namespace labbook::provstore
