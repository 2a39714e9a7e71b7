#include "labbook/session/mindmap.hpp"

#include <cmath>
#include <set>

#include "labbook/error.hpp"
#include "labbook/provstore/repository.hpp"

namespace labbook::session {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::invalid_input, "mind map: " + what); }

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string text_field(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double coord(const Json& v) {
  if (!v.is_number()) bad("position entries must be numbers");
  double d = v.get<double>();
  if (!std::isfinite(d)) bad("position entries must be finite");
  return d;
}

} // namespace

Json mindmap_to_json(const MindMap& map) {
  Json nodes = Json::array();
  for (const auto& n : map.nodes) {
    Json jn = {{"node_id", n.node_id},
               {"kind", n.kind == NodeKind::state ? "state" : "label"},
               {"position", Json::array({n.x, n.y})},
               {"text", n.text}};
    if (n.commit) jn["commit"] = n.commit->hex();
    nodes.push_back(std::move(jn));
  }
  Json edges = Json::array();
  for (const auto& e : map.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"label", e.label}});
  return {{"nodes", nodes}, {"edges", edges}};
}

MindMap mindmap_from_json(const Json& j) {
  if (!j.is_object()) bad("expected an object");
  const auto& nodes = field(j, "nodes");
  const auto& edges = field(j, "edges");
  if (!nodes.is_array() || !edges.is_array()) bad("nodes and edges must be arrays");
  MindMap map;
  for (const auto& jn : nodes) {
    if (!jn.is_object()) bad("node must be an object");
    MindMapNode n;
    n.node_id = text_field(jn, "node_id");
    auto kind = text_field(jn, "kind");
    if (kind == "state") {
      n.kind = NodeKind::state;
    } else if (kind == "label") {
      n.kind = NodeKind::label;
    } else {
      bad("unknown node kind '" + kind + "'");
    }
    if (auto it = jn.find("commit"); it != jn.end() && !it->is_null()) {
      if (!it->is_string()) bad("commit must be a 40-hex string");
      auto id = provstore::ObjectId::parse(it->get<std::string>());
      if (!id) bad("commit must be a 40-hex string");
      n.commit = *id;
    }
    const auto& pos = field(jn, "position");
    if (!pos.is_array() || pos.size() != 2) bad("position must be [x, y]");
    n.x = coord(pos[0]);
    n.y = coord(pos[1]);
    n.text = text_field(jn, "text");
    map.nodes.push_back(std::move(n));
  }
  for (const auto& je : edges) {
    if (!je.is_object()) bad("edge must be an object");
    map.edges.push_back({text_field(je, "from"), text_field(je, "to"), text_field(je, "label")});
  }
  validate_mindmap(map);
  return map;
}

void validate_mindmap(const MindMap& map) {
  std::set<std::string> ids;
  for (const auto& n : map.nodes) {
    if (n.node_id.empty()) bad("node_id must not be empty");
    if (!ids.insert(n.node_id).second) bad("duplicate node_id '" + n.node_id + "'");
    if (n.kind == NodeKind::state && !n.commit) bad("state node '" + n.node_id + "' needs a commit");
    if (n.kind == NodeKind::label && n.commit) bad("label node '" + n.node_id + "' must not carry a commit");
    if (!std::isfinite(n.x) || !std::isfinite(n.y)) bad("position must be finite");
  }
  for (const auto& e : map.edges) {
    if (!ids.contains(e.from) || !ids.contains(e.to)) {
      bad("edge " + e.from + " -> " + e.to + " references a missing node");
    }
  }
}

void validate_mindmap_refs(const MindMap& map, const provstore::Repository& repo) {
  for (const auto& n : map.nodes) {
    if (n.commit && !repo.is_commit(*n.commit)) {
      bad("node '" + n.node_id + "' references unknown commit " + n.commit->hex());
    }
  }
}

} // namespace labbook::session
