#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <condition_variable>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "labbook/provstore/objects.hpp"

namespace labbook::provstore {

struct StoredObject {
  ObjectKind kind;
  std::string content;
};

/// Where HEAD points: a branch (symbolic) or a bare commit (detached).
struct HeadState {
  std::optional<std::string> branch;
  ObjectId commit;

  bool detached() const noexcept { return !branch.has_value(); }
};

/// Contents of the parentless commit written when a repository is created.
struct RootSpec {
  std::vector<std::pair<std::string, std::string>> files; // name -> blob bytes
  std::string author = "labbook";
  Timestamp timestamp;
  std::string message = "Session start";
};

// Shared/exclusive lock that lets a waiting writer in ahead of new readers.
class WriterPriorityMutex {
public:
  void lock();
  void unlock();
  void lock_shared();
  void unlock_shared();

private:
  std::mutex mu_;
  std::condition_variable cv_;
  int readers_ = 0;
  int waiting_writers_ = 0;
  bool writer_ = false;
};

// `[A-Za-z0-9._/-]+`, additionally rejecting empty, dot-leading or ".lock"
// path segments so a ref always maps to a file below refs/heads.
bool is_valid_ref_name(std::string_view name) noexcept;

/// A provenance repository laid out as a bare git repository with loose
/// objects only. Mutations take an exclusive lock; lookups take a shared one,
/// so a handle can be shared between one writer and many reader threads.
class Repository {
public:
  // `path` must not exist or be an empty directory. Creates `main` pointing
  // at a session_start commit built from `root`, with HEAD attached to it.
  static Repository init(const std::filesystem::path& path, const RootSpec& root);
  // Throws Error(repo_error) if the layout is missing. Does not verify content.
  static Repository open(const std::filesystem::path& path);
  static bool looks_like_repository(const std::filesystem::path& path);

  Repository(Repository&&) noexcept = default;
  Repository& operator=(Repository&&) noexcept = default;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::string name() const;

  // Objects. put_object rejects non-canonical trees and commits whose tree or
  // parents are missing; get_object throws Error(not_found).
  ObjectId put_object(ObjectKind kind, std::string_view content);
  ObjectId put_blob(std::string_view bytes);
  ObjectId put_tree(const Tree& tree);
  StoredObject get_object(const ObjectId& id) const;
  bool contains(const ObjectId& id) const;
  std::string get_blob(const ObjectId& id) const;
  Tree get_tree(const ObjectId& id) const;
  StateCommit get_commit(const ObjectId& id) const;
  bool is_commit(const ObjectId& id) const;
  std::vector<ObjectId> list_objects() const;

  // Throws Error(integrity_error) on a missing tree/parent or a second root.
  StateCommit commit(const CommitData& data);
  std::optional<ObjectId> root() const;

  // Refs.
  void create_branch(const std::string& name, const ObjectId& at);
  void update_ref(const std::string& name, const ObjectId& target);
  ObjectId resolve_ref(const std::string& name) const;
  bool has_ref(const std::string& name) const;
  std::map<std::string, ObjectId> list_refs() const;
  // Branches whose tip is `commit`, sorted by name.
  std::vector<std::string> branches_at(const ObjectId& commit) const;

  HeadState head() const;
  void set_head_branch(const std::string& name);
  void set_head_detached(const ObjectId& commit);

  // Ancestors of `from` (inclusive), children before parents; ties broken by
  // timestamp descending, then id ascending.
  std::vector<StateCommit> log(const ObjectId& from) const;
  // Same ordering over everything reachable from any ref or HEAD.
  std::vector<StateCommit> log_all() const;

  // Annotations live outside the DAG; commit ids never change.
  Annotation annotate(const ObjectId& commit, const std::string& author, const std::string& text,
                      const Timestamp& when);
  std::vector<Annotation> annotations(const ObjectId& commit) const;
  std::map<ObjectId, std::vector<Annotation>> all_annotations() const;

private:
  explicit Repository(std::filesystem::path path);

  // Unlocked helpers; callers hold mu_.
  ObjectId put_object_locked(ObjectKind kind, std::string_view content);
  std::optional<StoredObject> read_object_locked(const ObjectId& id) const;
  StateCommit get_commit_locked(const ObjectId& id) const;
  std::optional<ObjectId> read_ref_locked(const std::string& name) const;
  void write_ref_locked(const std::string& name, const ObjectId& target);
  std::optional<ObjectId> find_root_locked() const;
  std::vector<StateCommit> log_locked(const std::vector<ObjectId>& starts) const;
  std::map<std::string, ObjectId> list_refs_locked() const;
  HeadState head_locked() const;

  std::filesystem::path path_;
  std::unique_ptr<WriterPriorityMutex> mu_;
  mutable std::optional<ObjectId> root_cache_;
};

// Atomic file replacement (write temp + rename).
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

} // namespace labbook::provstore
