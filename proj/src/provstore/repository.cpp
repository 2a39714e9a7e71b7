#include "labbook/provstore/repository.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <unistd.h>

#include "labbook/error.hpp"
#include "labbook/provstore/loose.hpp"

namespace labbook::provstore {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kGitConfig =
    "[core]\n\trepositoryformatversion = 0\n\tfilemode = true\n\tbare = true\n";

std::string trim_newline(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

[[noreturn]] void not_found(const std::string& what) { throw Error(Errc::not_found, what); }

} // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path.parent_path() / (".tmp-" + path.filename().string() + "-" +
                                       std::to_string(::getpid()) + "-" +
                                       std::to_string(counter.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw Error(Errc::io_error, "cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot replace " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io_error, "cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriterPriorityMutex::lock() {
  std::unique_lock lk(mu_);
  ++waiting_writers_;
  cv_.wait(lk, [&] { return !writer_ && readers_ == 0; });
  --waiting_writers_;
  writer_ = true;
}

void WriterPriorityMutex::unlock() {
  {
    std::lock_guard lk(mu_);
    writer_ = false;
  }
  cv_.notify_all();
}

void WriterPriorityMutex::lock_shared() {
  std::unique_lock lk(mu_);
  cv_.wait(lk, [&] { return !writer_ && waiting_writers_ == 0; });
  ++readers_;
}

void WriterPriorityMutex::unlock_shared() {
  bool last;
  {
    std::lock_guard lk(mu_);
    last = --readers_ == 0;
  }
  if (last) cv_.notify_all();
}

bool is_valid_ref_name(std::string_view name) noexcept {
  if (name.empty() || name == "HEAD") return false;
  for (char c : name) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '_' || c == '/' || c == '-';
    if (!ok) return false;
  }
  std::size_t start = 0;
  while (start <= name.size()) {
    auto end = name.find('/', start);
    if (end == std::string_view::npos) end = name.size();
    auto seg = name.substr(start, end - start);
    if (seg.empty() || seg.front() == '.' || seg.ends_with(".lock")) return false;
    start = end + 1;
  }
  return true;
}

Repository::Repository(fs::path path)
    : path_(std::move(path)), mu_(std::make_unique<WriterPriorityMutex>()) {}

bool Repository::looks_like_repository(const fs::path& path) {
  std::error_code ec;
  return fs::is_regular_file(path / "HEAD", ec) && fs::is_directory(path / "objects", ec) &&
         fs::is_directory(path / "refs" / "heads", ec);
}

Repository Repository::init(const fs::path& path, const RootSpec& root) {
  std::error_code ec;
  if (fs::exists(path, ec)) {
    if (!fs::is_directory(path, ec)) {
      throw Error(Errc::repo_error, "not a directory: " + path.string());
    }
    if (!fs::is_empty(path, ec)) {
      throw Error(Errc::already_exists, "directory not empty: " + path.string());
    }
  }
  fs::create_directories(path / "objects", ec);
  fs::create_directories(path / "refs" / "heads", ec);
  fs::create_directories(path / "annotations", ec);
  if (ec) {
    throw Error(Errc::repo_error, "cannot create repository at " + path.string());
  }
  write_file_atomic(path / "config", kGitConfig);
  write_file_atomic(path / "HEAD", "ref: refs/heads/main\n");

  Repository repo(path);
  Tree tree;
  auto files = root.files;
  std::sort(files.begin(), files.end());
  for (const auto& [name, bytes] : files) {
    tree.entries.push_back(TreeEntry{name, ObjectKind::blob, repo.put_blob(bytes)});
  }
  CommitData data;
  data.tree = repo.put_tree(tree);
  data.author = root.author;
  data.timestamp = root.timestamp;
  data.message = root.message;
  data.kind = CommitKind::session_start;
  auto c = repo.commit(data);
  repo.create_branch("main", c.id);
  return repo;
}

Repository Repository::open(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(Errc::repo_error, "no repository at " + path.string());
  }
  if (!fs::is_directory(path, ec)) {
    throw Error(Errc::repo_error, "not a directory: " + path.string());
  }
  if (!looks_like_repository(path)) {
    throw Error(Errc::repo_error, "not a provenance repository: " + path.string());
  }
  fs::create_directories(path / "annotations", ec);
  return Repository(path);
}

std::string Repository::name() const {
  auto p = path_;
  if (!p.has_filename()) p = p.parent_path();
  return p.filename().string();
}

// ---------------------------------------------------------------- objects

ObjectId Repository::put_object(ObjectKind kind, std::string_view content) {
  std::unique_lock lock(*mu_);
  return put_object_locked(kind, content);
}

ObjectId Repository::put_object_locked(ObjectKind kind, std::string_view content) {
  if (kind == ObjectKind::tree) {
    Tree tree;
    try {
      tree = parse_tree(content);
    } catch (const Error& e) {
      throw Error(Errc::invalid_input, e.what());
    }
    validate_tree(tree);
    for (const auto& e : tree.entries) {
      auto obj = read_object_locked(e.id);
      if (!obj || obj->kind != e.kind) {
        throw Error(Errc::integrity_error, "tree entry '" + e.name + "' references missing " +
                                               std::string(kind_name(e.kind)) + " " + e.id.hex());
      }
    }
  } else if (kind == ObjectKind::commit) {
    CommitData c;
    try {
      c = parse_commit(content);
    } catch (const Error& e) {
      throw Error(Errc::invalid_input, e.what());
    }
    if (serialize_commit(c) != content) {
      throw Error(Errc::invalid_input, "commit is not in canonical form");
    }
    auto tree = read_object_locked(c.tree);
    if (!tree || tree->kind != ObjectKind::tree) {
      throw Error(Errc::integrity_error, "commit tree missing: " + c.tree.hex());
    }
    for (const auto& p : c.parents) {
      auto parent = read_object_locked(p);
      if (!parent || parent->kind != ObjectKind::commit) {
        throw Error(Errc::integrity_error, "commit parent missing: " + p.hex());
      }
    }
  }

  ObjectId id = hash_object(kind, content);
  auto file = loose_object_path(path_, id);
  std::error_code ec;
  if (!fs::exists(file, ec)) {
    write_file_atomic(file, encode_loose_object(kind, content));
  }
  return id;
}

ObjectId Repository::put_blob(std::string_view bytes) {
  return put_object(ObjectKind::blob, bytes);
}

ObjectId Repository::put_tree(const Tree& tree) {
  validate_tree(tree);
  return put_object(ObjectKind::tree, serialize_tree(tree));
}

std::optional<StoredObject> Repository::read_object_locked(const ObjectId& id) const {
  auto file = loose_object_path(path_, id);
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) return std::nullopt;
  auto obj = decode_loose_object(read_file(file));
  return StoredObject{obj.kind, std::move(obj.content)};
}

StoredObject Repository::get_object(const ObjectId& id) const {
  std::shared_lock lock(*mu_);
  auto obj = read_object_locked(id);
  if (!obj) not_found("object not found: " + id.hex());
  return std::move(*obj);
}

bool Repository::contains(const ObjectId& id) const {
  std::error_code ec;
  return fs::is_regular_file(loose_object_path(path_, id), ec);
}

std::string Repository::get_blob(const ObjectId& id) const {
  auto obj = get_object(id);
  if (obj.kind != ObjectKind::blob) {
    throw Error(Errc::invalid_input, "not a blob: " + id.hex());
  }
  return std::move(obj.content);
}

Tree Repository::get_tree(const ObjectId& id) const {
  auto obj = get_object(id);
  if (obj.kind != ObjectKind::tree) {
    throw Error(Errc::invalid_input, "not a tree: " + id.hex());
  }
  return parse_tree(obj.content);
}

StateCommit Repository::get_commit_locked(const ObjectId& id) const {
  auto obj = read_object_locked(id);
  if (!obj) not_found("commit not found: " + id.hex());
  if (obj->kind != ObjectKind::commit) {
    not_found("not a commit: " + id.hex());
  }
  StateCommit c;
  static_cast<CommitData&>(c) = parse_commit(obj->content);
  c.id = id;
  return c;
}

StateCommit Repository::get_commit(const ObjectId& id) const {
  std::shared_lock lock(*mu_);
  return get_commit_locked(id);
}

bool Repository::is_commit(const ObjectId& id) const {
  std::shared_lock lock(*mu_);
  try {
    auto obj = read_object_locked(id);
    return obj && obj->kind == ObjectKind::commit;
  } catch (const Error&) {
    return false;
  }
}

std::vector<ObjectId> Repository::list_objects() const {
  std::shared_lock lock(*mu_);
  std::vector<ObjectId> out;
  std::error_code ec;
  for (const auto& dir : fs::directory_iterator(path_ / "objects", ec)) {
    auto prefix = dir.path().filename().string();
    if (!dir.is_directory() || prefix.size() != 2) continue;
    for (const auto& f : fs::directory_iterator(dir.path(), ec)) {
      if (auto id = ObjectId::parse(prefix + f.path().filename().string())) {
        out.push_back(*id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- commits

std::optional<ObjectId> Repository::find_root_locked() const {
  if (root_cache_) return root_cache_;
  auto tip = read_ref_locked("main");
  if (!tip) return std::nullopt;
  ObjectId cur = *tip;
  std::unordered_set<ObjectId> seen;
  for (;;) {
    if (!seen.insert(cur).second) return std::nullopt;
    StateCommit c;
    try {
      c = get_commit_locked(cur);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (c.parents.empty()) return cur;
    cur = c.parents.front();
  }
}

std::optional<ObjectId> Repository::root() const {
  std::shared_lock lock(*mu_);
  return find_root_locked();
}

StateCommit Repository::commit(const CommitData& data) {
  std::unique_lock lock(*mu_);
  std::string content = serialize_commit(data);
  ObjectId id = hash_object(ObjectKind::commit, content);
  if (data.parents.empty()) {
    auto existing = find_root_locked();
    if (existing && *existing != id) {
      throw Error(Errc::integrity_error,
                  "repository already has a root commit " + existing->hex());
    }
  }
  put_object_locked(ObjectKind::commit, content);
  if (data.parents.empty()) root_cache_ = id;
  StateCommit c;
  static_cast<CommitData&>(c) = parse_commit(content);
  c.id = id;
  return c;
}

// ---------------------------------------------------------------- refs

std::optional<ObjectId> Repository::read_ref_locked(const std::string& name) const {
  if (!is_valid_ref_name(name)) return std::nullopt;
  auto file = path_ / "refs" / "heads" / name;
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) return std::nullopt;
  return ObjectId::parse(trim_newline(read_file(file)));
}

void Repository::write_ref_locked(const std::string& name, const ObjectId& target) {
  write_file_atomic(path_ / "refs" / "heads" / name, target.hex() + "\n");
}

void Repository::create_branch(const std::string& name, const ObjectId& at) {
  if (!is_valid_ref_name(name)) {
    throw Error(Errc::invalid_name, "invalid branch name: '" + name + "'");
  }
  std::unique_lock lock(*mu_);
  auto file = path_ / "refs" / "heads" / name;
  std::error_code ec;
  if (fs::exists(file, ec)) {
    throw Error(Errc::already_exists, "branch already exists: " + name);
  }
  // A ref may not be both a file and a directory ("a" vs "a/b").
  for (auto p = file.parent_path(); p != path_ / "refs" / "heads"; p = p.parent_path()) {
    if (fs::is_regular_file(p, ec)) {
      throw Error(Errc::already_exists, "branch conflicts with existing ref: " + name);
    }
  }
  get_commit_locked(at);
  write_ref_locked(name, at);
}

void Repository::update_ref(const std::string& name, const ObjectId& target) {
  if (!is_valid_ref_name(name)) {
    throw Error(Errc::invalid_name, "invalid branch name: '" + name + "'");
  }
  std::unique_lock lock(*mu_);
  if (!read_ref_locked(name)) not_found("no such branch: " + name);
  get_commit_locked(target);
  write_ref_locked(name, target);
}

ObjectId Repository::resolve_ref(const std::string& name) const {
  std::shared_lock lock(*mu_);
  if (name == "HEAD") return head_locked().commit;
  auto id = read_ref_locked(name);
  if (!id) not_found("no such ref: " + name);
  return *id;
}

bool Repository::has_ref(const std::string& name) const {
  std::shared_lock lock(*mu_);
  return read_ref_locked(name).has_value();
}

std::map<std::string, ObjectId> Repository::list_refs_locked() const {
  std::map<std::string, ObjectId> out;
  auto base = path_ / "refs" / "heads";
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(base, ec); it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file()) continue;
    auto rel = fs::relative(it->path(), base, ec).generic_string();
    if (!is_valid_ref_name(rel)) continue;
    if (auto id = read_ref_locked(rel)) out.emplace(rel, *id);
  }
  return out;
}

std::map<std::string, ObjectId> Repository::list_refs() const {
  std::shared_lock lock(*mu_);
  return list_refs_locked();
}

std::vector<std::string> Repository::branches_at(const ObjectId& commit) const {
  std::vector<std::string> out;
  for (const auto& [name, id] : list_refs()) {
    if (id == commit) out.push_back(name);
  }
  return out;
}

HeadState Repository::head_locked() const {
  auto text = trim_newline(read_file(path_ / "HEAD"));
  constexpr std::string_view prefix = "ref: refs/heads/";
  if (text.starts_with(prefix)) {
    std::string branch = text.substr(prefix.size());
    auto id = read_ref_locked(branch);
    if (!id) throw Error(Errc::repo_error, "HEAD points at missing branch " + branch);
    return HeadState{branch, *id};
  }
  auto id = ObjectId::parse(text);
  if (!id) throw Error(Errc::repo_error, "HEAD is malformed");
  return HeadState{std::nullopt, *id};
}

HeadState Repository::head() const {
  std::shared_lock lock(*mu_);
  return head_locked();
}

void Repository::set_head_branch(const std::string& name) {
  std::unique_lock lock(*mu_);
  if (!read_ref_locked(name)) not_found("no such branch: " + name);
  write_file_atomic(path_ / "HEAD", "ref: refs/heads/" + name + "\n");
}

void Repository::set_head_detached(const ObjectId& commit) {
  std::unique_lock lock(*mu_);
  get_commit_locked(commit);
  write_file_atomic(path_ / "HEAD", commit.hex() + "\n");
}

// ---------------------------------------------------------------- history

std::vector<StateCommit> Repository::log_locked(const std::vector<ObjectId>& starts) const {
  std::unordered_map<ObjectId, StateCommit> commits;
  std::vector<ObjectId> stack(starts.begin(), starts.end());
  while (!stack.empty()) {
    ObjectId id = stack.back();
    stack.pop_back();
    if (commits.contains(id)) continue;
    auto c = get_commit_locked(id);
    for (const auto& p : c.parents) stack.push_back(p);
    commits.emplace(id, std::move(c));
  }

  std::unordered_map<ObjectId, int> children;
  for (const auto& [id, c] : commits) {
    children.try_emplace(id, 0);
    for (const auto& p : c.parents) ++children[p];
  }

  auto before = [&](const ObjectId& a, const ObjectId& b) {
    const auto& ta = commits.at(a).timestamp.seconds;
    const auto& tb = commits.at(b).timestamp.seconds;
    if (ta != tb) return ta > tb;
    return a < b;
  };
  std::set<ObjectId, decltype(before)> ready(before);
  for (const auto& [id, n] : children) {
    if (n == 0) ready.insert(id);
  }

  std::vector<StateCommit> out;
  out.reserve(commits.size());
  while (!ready.empty()) {
    ObjectId id = *ready.begin();
    ready.erase(ready.begin());
    const auto& c = commits.at(id);
    for (const auto& p : c.parents) {
      if (--children[p] == 0) ready.insert(p);
    }
    out.push_back(c);
  }
  return out;
}

std::vector<StateCommit> Repository::log(const ObjectId& from) const {
  std::shared_lock lock(*mu_);
  return log_locked({from});
}

std::vector<StateCommit> Repository::log_all() const {
  std::shared_lock lock(*mu_);
  std::vector<ObjectId> starts;
  for (const auto& [name, id] : list_refs_locked()) starts.push_back(id);
  starts.push_back(head_locked().commit);
  return log_locked(starts);
}

// ---------------------------------------------------------------- annotations

Annotation Repository::annotate(const ObjectId& commit, const std::string& author,
                                const std::string& text, const Timestamp& when) {
  if (text.empty()) {
    throw Error(Errc::invalid_input, "annotation text must not be empty");
  }
  std::unique_lock lock(*mu_);
  get_commit_locked(commit);
  Annotation a{commit, author, when, text};
  auto file = path_ / "annotations" / commit.hex();
  std::ofstream out(file, std::ios::binary | std::ios::app);
  auto record = format_annotation_record(a);
  out.write(record.data(), static_cast<std::streamsize>(record.size()));
  if (!out) {
    throw Error(Errc::io_error, "cannot append to " + file.string());
  }
  return a;
}

std::vector<Annotation> Repository::annotations(const ObjectId& commit) const {
  std::shared_lock lock(*mu_);
  std::vector<Annotation> out;
  auto file = path_ / "annotations" / commit.hex();
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) return out;
  std::istringstream in(read_file(file));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_annotation_record(commit, line));
  }
  return out;
}

std::map<ObjectId, std::vector<Annotation>> Repository::all_annotations() const {
  std::vector<ObjectId> ids;
  {
    std::shared_lock lock(*mu_);
    std::error_code ec;
    for (const auto& f : fs::directory_iterator(path_ / "annotations", ec)) {
      if (auto id = ObjectId::parse(f.path().filename().string())) ids.push_back(*id);
    }
  }
  std::map<ObjectId, std::vector<Annotation>> out;
  for (const auto& id : ids) {
    auto list = annotations(id);
    if (!list.empty()) out.emplace(id, std::move(list));
  }
  return out;
}

} // namespace labbook::provstore
