#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "labbook/provstore/repository.hpp"
#include "labbook/session/snapshot.hpp"
#include "labbook/time.hpp"

namespace labbook::session {

enum class Action { add, remove, bookmark };

/// One tool interaction. `add` carries the new shape (the session assigns
/// its id), `remove` the id to drop, `bookmark` only the view. All three
/// carry the camera and the screenshot as shown after the interaction.
struct InteractionEvent {
  Action action = Action::bookmark;
  std::optional<vftsim::MeasurementShape> shape;
  std::string remove_id;
  vftsim::CameraPose camera;
  std::string screenshot;
};

struct RecordResult {
  provstore::StateCommit commit;
  std::optional<std::string> measurement_id; // id minted for an add or redo-add
  std::optional<std::string> created_branch;
};

struct RestoreInstruction {
  provstore::ObjectId commit;
  provstore::HeadState head;
  Snapshot snapshot;
};

struct SessionOptions {
  std::string author = "labbook";
  std::shared_ptr<Clock> clock; // defaults to the system clock
  std::string scene = "ramp";   // used when the server renders redo states
};

/// Live session over one repository. Not thread-safe: callers serialize.
class Session {
public:
  // Creates the repository when `path` is missing or an empty directory;
  // otherwise opens and verifies it. Throws Error(repo_error).
  static Session start(const std::filesystem::path& path, SessionOptions options = {});

  provstore::Repository& repo() noexcept { return repo_; }
  const provstore::Repository& repo() const noexcept { return repo_; }
  provstore::HeadState head() const { return repo_.head(); }
  const Snapshot& current() const noexcept { return current_; }
  bool created() const noexcept { return created_; }
  const std::string& scene() const noexcept { return options_.scene; }
  void set_scene(std::string scene) { options_.scene = std::move(scene); }

  // Throws Error(invalid_input) for malformed events or unknown remove ids.
  RecordResult record_interaction(const InteractionEvent& event);
  // Throws Error(not_found) for an unknown commit.
  RestoreInstruction restore(const provstore::ObjectId& commit);
  // Throws Error(inapplicable) or Error(not_found).
  RecordResult redo(const provstore::ObjectId& commit);
  // No commit (nullopt) when the bytes equal HEAD's.
  std::optional<RecordResult> save_mindmap(const MindMap& map);
  std::optional<RecordResult> save_notes(const std::string& text);
  provstore::Annotation annotate_state(const provstore::ObjectId& commit, const std::string& text,
                                       const std::string& author);

  // Measurement list of a commit and the one it replaced, by id.
  struct Delta {
    std::vector<vftsim::Measurement> added;
    std::vector<vftsim::Measurement> removed;
  };
  Delta delta_of(const provstore::StateCommit& commit) const;

  static Snapshot empty_snapshot();

private:
  Session(provstore::Repository repo, SessionOptions options, bool created);

  RecordResult commit_state(Snapshot next, provstore::CommitKind kind, std::string message,
                            std::optional<std::string> measurement_id, const Timestamp& when);
  std::string mint_id(const provstore::ObjectId& parent, const Timestamp& when, std::string_view salt) const;

  provstore::Repository repo_;
  SessionOptions options_;
  Snapshot current_;
  bool created_ = false;
};

// Short human-readable summary used in commit messages.
std::string describe_shape(const vftsim::MeasurementShape& shape);

} // namespace labbook::session
