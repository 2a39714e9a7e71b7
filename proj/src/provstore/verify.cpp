#include "labbook/provstore/verify.hpp"

#include <map>
#include <sstream>

#include "labbook/error.hpp"
#include "labbook/provstore/loose.hpp"

namespace labbook::provstore {

namespace fs = std::filesystem;

namespace {

struct Scan {
  std::map<ObjectId, ObjectKind> kinds;
  std::map<ObjectId, std::string> content;
};

} // namespace

VerifyReport verify(const Repository& repo) {
  VerifyReport report;
  auto add = [&](std::string check, std::string subject, std::string detail) {
    report.findings.push_back({std::move(check), std::move(subject), std::move(detail)});
  };

  Scan scan;
  std::error_code ec;
  const auto objects = repo.path() / "objects";
  for (const auto& dir : fs::directory_iterator(objects, ec)) {
    auto prefix = dir.path().filename().string();
    if (!dir.is_directory()) {
      add("layout", prefix, "unexpected file in objects/");
      continue;
    }
    for (const auto& f : fs::directory_iterator(dir.path(), ec)) {
      auto name = f.path().filename().string();
      if (name.starts_with(".tmp-")) continue;
      auto id = ObjectId::parse(prefix + name);
      if (!id || prefix.size() != 2) {
        add("layout", prefix + "/" + name, "not an object file name");
        continue;
      }
      ++report.objects_checked;
      try {
        auto obj = decode_loose_object(read_file(f.path()));
        auto actual = hash_object(obj.kind, obj.content);
        if (actual != *id) {
          add("digest", id->hex(), "content hashes to " + actual.hex());
          continue;
        }
        scan.kinds.emplace(*id, obj.kind);
        scan.content.emplace(*id, std::move(obj.content));
      } catch (const Error& e) {
        add("decode", id->hex(), e.what());
      }
    }
  }

  auto kind_of = [&](const ObjectId& id) -> std::optional<ObjectKind> {
    auto it = scan.kinds.find(id);
    if (it == scan.kinds.end()) return std::nullopt;
    return it->second;
  };

  std::vector<ObjectId> roots;
  for (const auto& [id, kind] : scan.kinds) {
    const auto& content = scan.content.at(id);
    if (kind == ObjectKind::tree) {
      Tree tree;
      try {
        tree = parse_tree(content);
      } catch (const Error& e) {
        add("tree-format", id.hex(), e.what());
        continue;
      }
      try {
        validate_tree(tree);
      } catch (const Error& e) {
        add("tree-order", id.hex(), e.what());
      }
      for (const auto& e : tree.entries) {
        if (kind_of(e.id) != e.kind) {
          add("tree-entry", id.hex(), "entry '" + e.name + "' references missing " + e.id.hex());
        }
      }
    } else if (kind == ObjectKind::commit) {
      CommitData c;
      try {
        c = parse_commit(content);
      } catch (const Error& e) {
        add("commit-format", id.hex(), e.what());
        continue;
      }
      if (kind_of(c.tree) != ObjectKind::tree) {
        add("commit-tree", id.hex(), "tree " + c.tree.hex() + " missing");
      }
      for (const auto& p : c.parents) {
        if (kind_of(p) != ObjectKind::commit) {
          add("parent", id.hex(), "parent " + p.hex() + " missing");
        }
      }
      if (c.parents.empty()) roots.push_back(id);
    }
  }
  if (roots.size() > 1) {
    std::string list;
    for (const auto& r : roots) list += (list.empty() ? "" : ",") + r.hex();
    add("root", "repository", "multiple parentless commits: " + list);
  }

  const auto heads = repo.path() / "refs" / "heads";
  bool have_main = false;
  for (auto it = fs::recursive_directory_iterator(heads, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file()) continue;
    auto name = fs::relative(it->path(), heads, ec).generic_string();
    if (it->path().filename().string().starts_with(".tmp-")) continue;
    if (!is_valid_ref_name(name)) {
      add("ref", name, "invalid ref name");
      continue;
    }
    std::string text = read_file(it->path());
    if (!text.empty() && text.back() == '\n') text.pop_back();
    auto id = ObjectId::parse(text);
    if (!id) {
      add("ref", name, "malformed ref file");
    } else if (kind_of(*id) != ObjectKind::commit) {
      add("ref", name, "target " + id->hex() + " is not a commit");
    }
    if (name == "main") have_main = true;
  }
  if (!have_main) add("ref", "main", "branch main missing");

  try {
    auto head = repo.head();
    if (head.detached() && kind_of(head.commit) != ObjectKind::commit) {
      add("head", "HEAD", "detached HEAD points at missing commit " + head.commit.hex());
    }
  } catch (const Error& e) {
    add("head", "HEAD", e.what());
  }

  for (const auto& f : fs::directory_iterator(repo.path() / "annotations", ec)) {
    auto name = f.path().filename().string();
    if (name.starts_with(".tmp-")) continue;
    auto id = ObjectId::parse(name);
    if (!id) {
      add("annotation", name, "file name is not an object id");
      continue;
    }
    if (kind_of(*id) != ObjectKind::commit) {
      add("annotation", name, "annotates a missing commit");
    }
    std::istringstream in(read_file(f.path()));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      try {
        parse_annotation_record(*id, line);
      } catch (const Error& e) {
        add("annotation", name + ":" + std::to_string(lineno), e.what());
      }
    }
  }
  return report;
}

} // namespace labbook::provstore
