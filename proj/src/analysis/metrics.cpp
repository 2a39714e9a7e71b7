#include "labbook/analysis/metrics.hpp"

#include <set>

#include "labbook/error.hpp"
#include "labbook/provstore/verify.hpp"
#include "labbook/session/mindmap.hpp"
#include "labbook/session/snapshot.hpp"
#include "labbook/vftsim/measurement_json.hpp"

namespace labbook::analysis {

using provstore::CommitKind;
using provstore::ObjectId;

namespace {

std::string tree_file(const provstore::Repository& repo, const ObjectId& tree, const std::string& name) {
  for (const auto& e : repo.get_tree(tree).entries) {
    if (e.name == name) return repo.get_blob(e.id);
  }
  throw Error(Errc::repo_error, "tree " + tree.hex() + " has no " + name);
}

session::MindMap mindmap_at(const provstore::Repository& repo, const ObjectId& commit) {
  auto text = tree_file(repo, repo.get_commit(commit).tree, session::kMindMapFile);
  return session::mindmap_from_json(parse_json(text, "mind map"));
}

std::set<std::string> measurement_ids(const provstore::Repository& repo, const ObjectId& tree) {
  auto list = vftsim::measurements_from_json(parse_json(tree_file(repo, tree, session::kMeasurementsFile), "measurements"));
  std::set<std::string> ids;
  for (const auto& m : list) ids.insert(m.id);
  return ids;
}

} // namespace

std::int64_t count_code_points(std::string_view text) noexcept {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < text.size();) {
    auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 1;
    bool ok = i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) ok = (static_cast<unsigned char>(text[i + k]) & 0xc0) == 0x80;
    i += ok ? len : 1;
    ++n;
  }
  return n;
}

UsageMetrics repo_metrics(const provstore::Repository& repo) {
  UsageMetrics m;
  try {
    std::set<std::pair<std::string, std::string>> placed;
    for (const auto& c : repo.log_all()) {
      switch (c.kind) {
      case CommitKind::measurement_added:
      case CommitKind::measurement_removed:
        ++m.measurement_interactions;
        break;
      case CommitKind::redo:
        if (!c.parents.empty() &&
            measurement_ids(repo, c.tree) != measurement_ids(repo, repo.get_commit(c.parents[0]).tree)) {
          ++m.measurement_interactions;
        }
        break;
      case CommitKind::mindmap_update:
        ++m.mindmap_saves;
        for (const auto& node : mindmap_at(repo, c.id).nodes) {
          if (node.kind == session::NodeKind::state && node.commit) placed.emplace(node.node_id, node.commit->hex());
        }
        break;
      default:
        break;
      }
    }
    m.mindmap_states_cumulative = static_cast<std::int64_t>(placed.size());
    for (const auto& node : mindmap_at(repo, repo.head().commit).nodes) {
      if (node.kind == session::NodeKind::state) ++m.mindmap_states_final;
    }
    for (const auto& [commit, notes] : repo.all_annotations()) {
      if (notes.empty()) continue;
      ++m.annotated_states;
      for (const auto& a : notes) m.annotation_chars += count_code_points(a.text);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::repo_error) throw;
    throw Error(Errc::repo_error, std::string("unreadable repository content: ") + e.what());
  }
  return m;
}

UsageMetrics repo_metrics(const std::filesystem::path& path) {
  auto repo = provstore::Repository::open(path);
  auto report = provstore::verify(repo);
  if (!report.ok()) {
    throw Error(Errc::repo_error, path.string() + " fails verification (" +
                                      std::to_string(report.findings.size()) + " findings)");
  }
  return repo_metrics(repo);
}

Json metrics_to_json(const UsageMetrics& m) {
  return {{"mindmap_saves", m.mindmap_saves},
          {"mindmap_states_final", m.mindmap_states_final},
          {"mindmap_states_cumulative", m.mindmap_states_cumulative},
          {"measurement_interactions", m.measurement_interactions},
          {"annotated_states", m.annotated_states},
          {"annotation_chars", m.annotation_chars}};
}

} // namespace labbook::analysis
