#include "labbook/session/session.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "labbook/encoding.hpp"
#include "labbook/error.hpp"
#include "labbook/provstore/verify.hpp"
#include "labbook/vftsim/measurement_json.hpp"
#include "labbook/vftsim/render.hpp"

namespace labbook::session {

namespace fs = std::filesystem;
using provstore::CommitKind;
using provstore::ObjectId;
using provstore::Repository;
using provstore::StateCommit;

namespace {

constexpr char kCrockford[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string point_text(const vftsim::Point3& p) {
  return "(" + fmt(p.x) + ", " + fmt(p.y) + ", " + fmt(p.z) + ")";
}

bool shape_points_finite(const vftsim::MeasurementShape& shape) {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, vftsim::LocationMarker>) {
          return vftsim::is_finite(s.p);
        } else if constexpr (std::is_same_v<T, vftsim::Distance>) {
          return vftsim::is_finite(s.a) && vftsim::is_finite(s.b);
        } else {
          return vftsim::is_finite(s.p1) && vftsim::is_finite(s.p2) && vftsim::is_finite(s.p3);
        }
      },
      shape);
}

std::string next_branch_name(const Repository& repo) {
  auto refs = repo.list_refs();
  for (int n = 1;; ++n) {
    auto name = "branch-" + std::to_string(n);
    if (!refs.contains(name)) return name;
  }
}

} // namespace

std::string describe_shape(const vftsim::MeasurementShape& shape) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, vftsim::LocationMarker>) {
          return "marker '" + s.label + "' at " + point_text(s.p);
        } else if constexpr (std::is_same_v<T, vftsim::Distance>) {
          return "distance " + fmt(s.length_m) + " m";
        } else {
          return "strike/dip " + fmt(s.strike_deg) + "/" + fmt(s.dip_deg);
        }
      },
      shape);
}

Snapshot Session::empty_snapshot() { return Snapshot{}; }

Session::Session(Repository repo, SessionOptions options, bool created)
    : repo_(std::move(repo)), options_(std::move(options)), created_(created) {
  if (!options_.clock) options_.clock = std::make_shared<SystemClock>();
}

Session Session::start(const fs::path& path, SessionOptions options) {
  std::error_code ec;
  bool fresh = !fs::exists(path, ec) || (fs::is_directory(path, ec) && fs::is_empty(path, ec));
  if (fs::exists(path, ec) && !fs::is_directory(path, ec)) {
    throw Error(Errc::repo_error, "not a directory: " + path.string());
  }
  if (fresh) {
    if (!options.clock) options.clock = std::make_shared<SystemClock>();
    provstore::RootSpec root;
    for (auto& [name, bytes] : snapshot_files(empty_snapshot())) root.files.emplace_back(name, bytes);
    root.author = options.author;
    root.timestamp = options.clock->now();
    Session s(Repository::init(path, root), std::move(options), true);
    s.current_ = empty_snapshot();
    return s;
  }
  if (!Repository::looks_like_repository(path)) {
    throw Error(Errc::repo_error, "not a provenance repository: " + path.string());
  }
  auto repo = Repository::open(path);
  auto report = provstore::verify(repo);
  if (!report.ok()) {
    const auto& f = report.findings.front();
    throw Error(Errc::repo_error, "repository fails verification (" + f.check + " " + f.subject + ": " + f.detail +
                                      ")");
  }
  Session s(std::move(repo), std::move(options), false);
  try {
    s.current_ = read_snapshot(s.repo_, s.repo_.get_commit(s.repo_.head().commit).tree);
  } catch (const Error& e) {
    throw Error(Errc::repo_error, std::string("HEAD does not hold a valid snapshot: ") + e.what());
  }
  return s;
}

std::string Session::mint_id(const ObjectId& parent, const Timestamp& when, std::string_view salt) const {
  // ULID layout: 48-bit millisecond time, then 80 bits that only depend on
  // the parent commit, so replays mint the same ids.
  std::uint64_t ms = static_cast<std::uint64_t>(std::max<std::int64_t>(when.seconds, 0)) * 1000;
  std::string out(26, '0');
  for (int i = 9; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kCrockford[ms & 31];
    ms >>= 5;
  }
  auto digest = sha1(parent.hex() + ":" + std::string(salt));
  // 80 bits = 16 five-bit groups taken from the first 10 bytes.
  unsigned __int128 bits = 0;
  for (int i = 0; i < 10; ++i) bits = (bits << 8) | digest[static_cast<std::size_t>(i)];
  for (int i = 25; i >= 10; --i) {
    out[static_cast<std::size_t>(i)] = kCrockford[static_cast<unsigned>(bits & 31)];
    bits >>= 5;
  }
  return out;
}

RecordResult Session::commit_state(Snapshot next, CommitKind kind, std::string message,
                                   std::optional<std::string> measurement_id, const Timestamp& when) {
  auto head = repo_.head();
  provstore::CommitData data;
  data.tree = write_snapshot(repo_, next);
  data.parents = {head.commit};
  data.author = options_.author;
  data.timestamp = when;
  data.message = std::move(message);
  data.kind = kind;
  RecordResult result{repo_.commit(data), std::move(measurement_id), std::nullopt};
  if (head.branch) {
    repo_.update_ref(*head.branch, result.commit.id);
  } else {
    auto name = next_branch_name(repo_);
    repo_.create_branch(name, result.commit.id);
    repo_.set_head_branch(name);
    result.created_branch = name;
  }
  current_ = std::move(next);
  return result;
}

RecordResult Session::record_interaction(const InteractionEvent& event) {
  vftsim::validate_camera(event.camera);
  validate_screenshot(event.screenshot);
  if (event.screenshot.empty()) throw Error(Errc::invalid_input, "event lacks a screenshot");

  auto now = options_.clock->now();
  Snapshot next = current_;
  next.camera = event.camera;
  next.screenshot = event.screenshot;
  switch (event.action) {
    case Action::add: {
      if (!event.shape) throw Error(Errc::invalid_input, "add event lacks a measurement");
      if (!shape_points_finite(*event.shape)) throw Error(Errc::invalid_input, "measurement points must be finite");
      vftsim::MeasurementShape shape;
      try {
        shape = vftsim::remeasure(*event.shape);
      } catch (const Error& e) {
        throw Error(Errc::invalid_input, e.what());
      }
      auto id = mint_id(repo_.head().commit, now, "add");
      next.measurements.push_back({id, shape});
      return commit_state(std::move(next), CommitKind::measurement_added, "Add " + describe_shape(shape), id, now);
    }
    case Action::remove: {
      auto it = std::find_if(next.measurements.begin(), next.measurements.end(),
                             [&](const vftsim::Measurement& m) { return m.id == event.remove_id; });
      if (it == next.measurements.end()) {
        throw Error(Errc::invalid_input, "no measurement with id '" + event.remove_id + "'");
      }
      auto message = "Remove " + describe_shape(it->shape);
      next.measurements.erase(it);
      return commit_state(std::move(next), CommitKind::measurement_removed, message, std::nullopt, now);
    }
    case Action::bookmark:
      return commit_state(std::move(next), CommitKind::camera_moved, "Bookmark view", std::nullopt, now);
  }
  throw Error(Errc::invalid_input, "unknown action");
}

RestoreInstruction Session::restore(const ObjectId& commit) {
  if (!repo_.is_commit(commit)) throw Error(Errc::not_found, "no commit " + commit.hex());
  auto snapshot = read_snapshot(repo_, repo_.get_commit(commit).tree);
  auto head = repo_.head();
  auto tips = repo_.branches_at(commit);
  if (tips.empty()) {
    repo_.set_head_detached(commit);
  } else if (!(head.branch && std::ranges::find(tips, *head.branch) != tips.end())) {
    auto main = std::ranges::find(tips, std::string("main"));
    repo_.set_head_branch(main != tips.end() ? *main : tips.front());
  }
  current_ = snapshot;
  return {commit, repo_.head(), std::move(snapshot)};
}

Session::Delta Session::delta_of(const StateCommit& commit) const {
  Delta d;
  if (commit.parents.empty()) return d;
  auto before = read_snapshot(repo_, repo_.get_commit(commit.parents.front()).tree).measurements;
  auto after = read_snapshot(repo_, commit.tree).measurements;
  std::set<std::string> before_ids;
  std::set<std::string> after_ids;
  for (const auto& m : before) before_ids.insert(m.id);
  for (const auto& m : after) after_ids.insert(m.id);
  for (const auto& m : after) {
    if (!before_ids.contains(m.id)) d.added.push_back(m);
  }
  for (const auto& m : before) {
    if (!after_ids.contains(m.id)) d.removed.push_back(m);
  }
  return d;
}

RecordResult Session::redo(const ObjectId& commit_id) {
  if (!repo_.is_commit(commit_id)) throw Error(Errc::not_found, "no commit " + commit_id.hex());
  auto commit = repo_.get_commit(commit_id);
  if (commit.kind != CommitKind::measurement_added && commit.kind != CommitKind::measurement_removed) {
    throw Error(Errc::inapplicable,
                "redo needs a measurement commit, " + commit_id.hex() + " is " + std::string(kind_name(commit.kind)));
  }
  auto delta = delta_of(commit);
  auto now = options_.clock->now();
  Snapshot next = current_;
  std::optional<std::string> minted;
  std::string message;
  if (commit.kind == CommitKind::measurement_added) {
    if (delta.added.size() != 1 || !delta.removed.empty()) {
      throw Error(Errc::inapplicable, "commit " + commit_id.hex() + " does not add exactly one measurement");
    }
    minted = mint_id(repo_.head().commit, now, "redo");
    next.measurements.push_back({*minted, delta.added.front().shape});
    message = "Redo add " + describe_shape(delta.added.front().shape);
  } else {
    if (delta.removed.size() != 1 || !delta.added.empty()) {
      throw Error(Errc::inapplicable, "commit " + commit_id.hex() + " does not remove exactly one measurement");
    }
    const auto& gone = delta.removed.front();
    auto it = std::find_if(next.measurements.begin(), next.measurements.end(),
                           [&](const vftsim::Measurement& m) { return m.id == gone.id; });
    if (it == next.measurements.end()) {
      throw Error(Errc::inapplicable, "measurement " + gone.id + " is not present in the current state");
    }
    next.measurements.erase(it);
    message = "Redo remove " + describe_shape(gone.shape);
  }
  message += " from " + commit_id.hex().substr(0, 12);
  next.screenshot = vftsim::render_screenshot(options_.scene, next.measurements, next.camera);
  return commit_state(std::move(next), CommitKind::redo, std::move(message), minted, now);
}

std::optional<RecordResult> Session::save_mindmap(const MindMap& map) {
  validate_mindmap(map);
  validate_mindmap_refs(map, repo_);
  if (canonical_dump(mindmap_to_json(map)) == canonical_dump(mindmap_to_json(current_.mindmap))) {
    return std::nullopt;
  }
  auto now = options_.clock->now();
  Snapshot next = current_;
  next.mindmap = map;
  return commit_state(std::move(next), CommitKind::mindmap_update, "Update mind map", std::nullopt, now);
}

std::optional<RecordResult> Session::save_notes(const std::string& text) {
  if (!is_valid_utf8(text)) throw Error(Errc::invalid_input, "notes must be valid UTF-8");
  if (text == current_.notes) return std::nullopt;
  auto now = options_.clock->now();
  Snapshot next = current_;
  next.notes = text;
  return commit_state(std::move(next), CommitKind::notes_update, "Update notes", std::nullopt, now);
}

provstore::Annotation Session::annotate_state(const ObjectId& commit, const std::string& text,
                                              const std::string& author) {
  return repo_.annotate(commit, author, text, options_.clock->now());
}

} // namespace labbook::session
