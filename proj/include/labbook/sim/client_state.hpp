#pragma once

#include <optional>
#include <string>
#include <vector>

#include "labbook/canonical_json.hpp"
#include "labbook/session/session.hpp"

namespace labbook::sim {

/// Local state of the reference visualization client. Edits update the
/// local view at once and return the event to send; the server's ack then
/// supplies the id of an added measurement.
class ClientState {
public:
  explicit ClientState(std::string scene = "ramp") : scene_(std::move(scene)) {}

  const std::string& scene() const noexcept { return scene_; }
  const std::vector<vftsim::Measurement>& measurements() const noexcept { return snapshot_.measurements; }
  const vftsim::CameraPose& camera() const noexcept { return snapshot_.camera; }

  session::InteractionEvent place_marker(const vftsim::Point3& p, const std::string& label);
  session::InteractionEvent place_distance(const vftsim::Point3& a, const vftsim::Point3& b);
  // Throws Error(degenerate_geometry) before anything changes.
  session::InteractionEvent place_strike_dip(const vftsim::Point3& p1, const vftsim::Point3& p2,
                                             const vftsim::Point3& p3);
  // Throws Error(not_found) for an unknown id; nothing is sent then.
  session::InteractionEvent remove_measurement(std::string id); // by value: callers may pass an id from measurements()
  // Moves the view locally; only bookmark() turns it into a commit.
  void set_camera(const vftsim::CameraPose& pose);
  session::InteractionEvent bookmark();

  // Applies a committed ack: fills in the pending measurement's id.
  void on_committed(const Json& payload);
  // Drops the pending edit after the server refused it.
  void on_rejected();

  // Replaces measurements, camera, screenshot, mind map and notes wholesale.
  // Throws Error(invalid_snapshot).
  void apply_snapshot(const session::Snapshot& snapshot);
  void apply_snapshot_wire(const Json& wire);
  // The state as the server would store it.
  session::Snapshot serialize() const { return snapshot_; }

private:
  session::InteractionEvent begin_add(vftsim::MeasurementShape shape);
  void rerender();

  std::string scene_;
  session::Snapshot snapshot_;
  std::optional<session::Snapshot> before_pending_;
  std::optional<std::size_t> pending_add_;
};

} // namespace labbook::sim
