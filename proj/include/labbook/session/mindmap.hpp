#pragma once

#include <optional>
#include <string>
#include <vector>

#include "labbook/canonical_json.hpp"
#include "labbook/provstore/object_id.hpp"

namespace labbook::provstore {
class Repository;
}

namespace labbook::session {

enum class NodeKind { state, label };

struct MindMapNode {
  std::string node_id;
  NodeKind kind = NodeKind::label;
  std::optional<provstore::ObjectId> commit; // set iff kind == state
  double x = 0;
  double y = 0;
  std::string text;

  friend bool operator==(const MindMapNode&, const MindMapNode&) = default;
};

struct MindMapEdge {
  std::string from;
  std::string to;
  std::string label;

  friend bool operator==(const MindMapEdge&, const MindMapEdge&) = default;
};

struct MindMap {
  std::vector<MindMapNode> nodes;
  std::vector<MindMapEdge> edges;

  friend bool operator==(const MindMap&, const MindMap&) = default;
};

// {"edges":[{"from","to","label"}],"nodes":[{"node_id","kind","commit"?,"position":[x,y],"text"}]}
Json mindmap_to_json(const MindMap& map);
// Checks structure: unique non-empty node ids, edges between existing nodes,
// commit present exactly on state nodes. Throws Error(invalid_input).
MindMap mindmap_from_json(const Json& j);
void validate_mindmap(const MindMap& map);
// Every state node must name a commit stored in `repo`.
void validate_mindmap_refs(const MindMap& map, const provstore::Repository& repo);

} // namespace labbook::session
