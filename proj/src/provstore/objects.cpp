#include "labbook/provstore/objects.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include "labbook/error.hpp"

namespace labbook::provstore {

namespace {

constexpr std::array kCommitKindNames{
    std::string_view{"session_start"}, std::string_view{"measurement_added"},
    std::string_view{"measurement_removed"}, std::string_view{"camera_moved"},
    std::string_view{"mindmap_update"}, std::string_view{"notes_update"},
    std::string_view{"redo"}};

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::integrity_error, "malformed object: " + what);
}

std::string escape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
    case '\\': out += "\\\\"; break;
    case '\t': out += "\\t"; break;
    case '\n': out += "\\n"; break;
    case '\r': out += "\\r"; break;
    default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\') {
      out.push_back(text[i]);
      continue;
    }
    if (++i == text.size()) malformed("dangling escape in annotation");
    switch (text[i]) {
    case '\\': out.push_back('\\'); break;
    case 't': out.push_back('\t'); break;
    case 'n': out.push_back('\n'); break;
    case 'r': out.push_back('\r'); break;
    default: malformed("unknown escape in annotation");
    }
  }
  return out;
}

std::string signature_line(std::string_view role, const CommitData& c) {
  return std::string(role) + " " + c.author + " <> " + std::to_string(c.timestamp.seconds) +
         " " + format_git_offset(c.timestamp.offset_minutes) + "\n";
}

void parse_signature(std::string_view value, CommitData& out) {
  // "<name> <<email>> <seconds> <tz>"
  auto gt = value.rfind('>');
  auto lt = value.rfind(" <", gt);
  if (gt == std::string_view::npos || lt == std::string_view::npos) malformed("bad signature");
  out.author = std::string(value.substr(0, lt));
  auto rest = value.substr(gt + 1);
  if (rest.size() < 2 || rest[0] != ' ') malformed("bad signature time");
  rest.remove_prefix(1);
  auto sp = rest.find(' ');
  if (sp == std::string_view::npos) malformed("bad signature time");
  std::int64_t secs = 0;
  auto [p, ec] = std::from_chars(rest.data(), rest.data() + sp, secs);
  if (ec != std::errc{} || p != rest.data() + sp) malformed("bad signature time");
  out.timestamp.seconds = secs;
  try {
    out.timestamp.offset_minutes = parse_git_offset(rest.substr(sp + 1));
  } catch (const Error&) {
    malformed("bad signature offset");
  }
}

} // namespace

std::string_view kind_name(ObjectKind kind) noexcept {
  switch (kind) {
  case ObjectKind::blob: return "blob";
  case ObjectKind::tree: return "tree";
  case ObjectKind::commit: return "commit";
  }
  return "blob";
}

std::optional<ObjectKind> parse_object_kind(std::string_view name) noexcept {
  if (name == "blob") return ObjectKind::blob;
  if (name == "tree") return ObjectKind::tree;
  if (name == "commit") return ObjectKind::commit;
  return std::nullopt;
}

ObjectId hash_object(ObjectKind kind, std::string_view content) {
  std::string header = std::string(kind_name(kind)) + " " + std::to_string(content.size());
  header.push_back('\0');
  return ObjectId::from_digest(Sha1{}.update(header).update(content).finish());
}

const TreeEntry* Tree::find(std::string_view name) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const TreeEntry& e) { return e.name == name; });
  return it == entries.end() ? nullptr : &*it;
}

void validate_tree(const Tree& tree) {
  for (std::size_t i = 0; i < tree.entries.size(); ++i) {
    const auto& e = tree.entries[i];
    if (e.name.empty()) {
      throw Error(Errc::invalid_input, "tree entry with empty name");
    }
    if (e.name.find('/') != std::string::npos || e.name.find('\0') != std::string::npos) {
      throw Error(Errc::invalid_input, "tree entry name contains a separator: " + e.name);
    }
    if (e.kind == ObjectKind::commit) {
      throw Error(Errc::invalid_input, "tree entry may not reference a commit: " + e.name);
    }
    if (i > 0) {
      const auto& prev = tree.entries[i - 1].name;
      if (prev == e.name) {
        throw Error(Errc::invalid_input, "duplicate tree entry: " + e.name);
      }
      if (!(prev < e.name)) {
        throw Error(Errc::invalid_input, "tree entries not sorted at: " + e.name);
      }
    }
  }
}

std::string serialize_tree(const Tree& tree) {
  std::string out;
  for (const auto& e : tree.entries) {
    out += e.kind == ObjectKind::tree ? "40000 " : "100644 ";
    out += e.name;
    out.push_back('\0');
    out += e.id.raw();
  }
  return out;
}

Tree parse_tree(std::string_view content) {
  Tree tree;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto sp = content.find(' ', pos);
    if (sp == std::string_view::npos) malformed("tree entry without mode");
    auto mode = content.substr(pos, sp - pos);
    auto nul = content.find('\0', sp + 1);
    if (nul == std::string_view::npos || nul + 21 > content.size()) malformed("truncated tree entry");
    TreeEntry e;
    if (mode == "100644" || mode == "100755") {
      e.kind = ObjectKind::blob;
    } else if (mode == "40000") {
      e.kind = ObjectKind::tree;
    } else {
      malformed("unsupported tree mode " + std::string(mode));
    }
    e.name = std::string(content.substr(sp + 1, nul - sp - 1));
    e.id = ObjectId::from_raw(content.substr(nul + 1, 20));
    tree.entries.push_back(std::move(e));
    pos = nul + 21;
  }
  return tree;
}

std::string_view kind_name(CommitKind kind) noexcept {
  return kCommitKindNames[static_cast<std::size_t>(kind)];
}

std::optional<CommitKind> parse_commit_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kCommitKindNames.size(); ++i) {
    if (kCommitKindNames[i] == name) return static_cast<CommitKind>(i);
  }
  return std::nullopt;
}

std::string serialize_commit(const CommitData& c) {
  if (c.parents.size() > 2) {
    throw Error(Errc::invalid_input, "a commit has at most two parents");
  }
  if (c.author.empty() || c.author.find_first_of("<>\n\0", 0, 4) != std::string::npos) {
    throw Error(Errc::invalid_input, "author must be non-empty and free of '<', '>' and newlines");
  }
  if (c.message.find('\0') != std::string::npos) {
    throw Error(Errc::invalid_input, "commit message contains NUL");
  }
  std::string message = c.message;
  while (!message.empty() && message.back() == '\n') message.pop_back();

  std::string out = "tree " + c.tree.hex() + "\n";
  for (const auto& p : c.parents) out += "parent " + p.hex() + "\n";
  out += signature_line("author", c);
  out += signature_line("committer", c);
  out += "\n";
  if (!message.empty()) out += message + "\n\n";
  out += "Kind: " + std::string(kind_name(c.kind)) + "\n";
  return out;
}

CommitData parse_commit(std::string_view content) {
  CommitData c;
  std::size_t pos = 0;
  bool have_tree = false;
  bool have_author = false;
  for (;;) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) malformed("commit header not terminated");
    auto line = content.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) break;
    auto sp = line.find(' ');
    if (sp == std::string_view::npos) malformed("commit header line");
    auto key = line.substr(0, sp);
    auto value = line.substr(sp + 1);
    if (key == "tree") {
      auto id = ObjectId::parse(value);
      if (!id || have_tree) malformed("commit tree");
      c.tree = *id;
      have_tree = true;
    } else if (key == "parent") {
      auto id = ObjectId::parse(value);
      if (!id || !have_tree || have_author) malformed("commit parent");
      c.parents.push_back(*id);
    } else if (key == "author") {
      parse_signature(value, c);
      have_author = true;
    } else if (key == "committer") {
      // mirrors author
    } else {
      malformed("unknown commit header " + std::string(key));
    }
  }
  if (!have_tree || !have_author) malformed("commit missing tree or author");
  if (c.parents.size() > 2) malformed("commit has more than two parents");

  auto body = content.substr(pos);
  constexpr std::string_view trailer = "Kind: ";
  std::string_view kind_line;
  if (body.starts_with(trailer) && std::count(body.begin(), body.end(), '\n') == 1 && body.back() == '\n') {
    kind_line = body;
    c.message.clear();
  } else {
    auto at = body.rfind("\n\nKind: ");
    if (at == std::string_view::npos) malformed("commit without Kind trailer");
    kind_line = body.substr(at + 2);
    c.message = std::string(body.substr(0, at));
  }
  if (kind_line.empty() || kind_line.back() != '\n') malformed("Kind trailer not terminated");
  auto kind_text = kind_line.substr(trailer.size(), kind_line.size() - trailer.size() - 1);
  auto kind = parse_commit_kind(kind_text);
  if (!kind) malformed("unknown commit kind " + std::string(kind_text));
  c.kind = *kind;
  return c;
}

std::string format_annotation_record(const Annotation& a) {
  return format_rfc3339(a.timestamp) + "\t" + escape_field(a.author) + "\t" +
         escape_field(a.text) + "\n";
}

Annotation parse_annotation_record(const ObjectId& commit, std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  auto t1 = line.find('\t');
  auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
  if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
    malformed("annotation record needs three tab-separated fields");
  }
  Annotation a;
  a.commit = commit;
  try {
    a.timestamp = parse_rfc3339(line.substr(0, t1));
  } catch (const Error& e) {
    malformed(std::string("annotation timestamp: ") + e.what());
  }
  a.author = unescape_field(line.substr(t1 + 1, t2 - t1 - 1));
  a.text = unescape_field(line.substr(t2 + 1));
  return a;
}

} // namespace labbook::provstore
