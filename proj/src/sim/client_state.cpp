#include "labbook/sim/client_state.hpp"

#include <algorithm>

#include "labbook/error.hpp"
#include "labbook/protocol/messages.hpp"
#include "labbook/vftsim/render.hpp"

namespace labbook::sim {

void ClientState::rerender() {
  snapshot_.screenshot = vftsim::render_screenshot(scene_, snapshot_.measurements, snapshot_.camera);
}

session::InteractionEvent ClientState::begin_add(vftsim::MeasurementShape shape) {
  before_pending_ = snapshot_;
  snapshot_.measurements.push_back({"", shape});
  pending_add_ = snapshot_.measurements.size() - 1;
  rerender();
  session::InteractionEvent e;
  e.action = session::Action::add;
  e.shape = std::move(shape);
  e.camera = snapshot_.camera;
  e.screenshot = snapshot_.screenshot;
  return e;
}

session::InteractionEvent ClientState::place_marker(const vftsim::Point3& p, const std::string& label) {
  if (!vftsim::is_finite(p)) throw Error(Errc::invalid_input, "marker position must be finite");
  return begin_add(vftsim::LocationMarker{p, label});
}

session::InteractionEvent ClientState::place_distance(const vftsim::Point3& a, const vftsim::Point3& b) {
  if (!vftsim::is_finite(a) || !vftsim::is_finite(b)) throw Error(Errc::invalid_input, "points must be finite");
  return begin_add(vftsim::measure_distance(a, b));
}

session::InteractionEvent ClientState::place_strike_dip(const vftsim::Point3& p1, const vftsim::Point3& p2,
                                                        const vftsim::Point3& p3) {
  return begin_add(vftsim::measure_strike_dip(p1, p2, p3));
}

session::InteractionEvent ClientState::remove_measurement(std::string id) {
  auto& list = snapshot_.measurements;
  auto it = std::find_if(list.begin(), list.end(), [&](const vftsim::Measurement& m) { return m.id == id; });
  if (it == list.end()) throw Error(Errc::not_found, "no measurement with id '" + id + "'");
  before_pending_ = snapshot_;
  pending_add_.reset();
  list.erase(it);
  rerender();
  session::InteractionEvent e;
  e.action = session::Action::remove;
  e.remove_id = id;
  e.camera = snapshot_.camera;
  e.screenshot = snapshot_.screenshot;
  return e;
}

void ClientState::set_camera(const vftsim::CameraPose& pose) {
  vftsim::validate_camera(pose);
  snapshot_.camera = pose;
  rerender();
}

session::InteractionEvent ClientState::bookmark() {
  before_pending_ = snapshot_;
  pending_add_.reset();
  rerender();
  session::InteractionEvent e;
  e.action = session::Action::bookmark;
  e.camera = snapshot_.camera;
  e.screenshot = snapshot_.screenshot;
  return e;
}

void ClientState::on_committed(const Json& payload) {
  if (pending_add_ && payload.contains("measurement_id") && payload["measurement_id"].is_string() &&
      *pending_add_ < snapshot_.measurements.size()) {
    snapshot_.measurements[*pending_add_].id = payload["measurement_id"].get<std::string>();
  }
  pending_add_.reset();
  before_pending_.reset();
}

void ClientState::on_rejected() {
  if (before_pending_) snapshot_ = std::move(*before_pending_);
  before_pending_.reset();
  pending_add_.reset();
}

void ClientState::apply_snapshot(const session::Snapshot& snapshot) {
  // Round-trip through the file form so anything the server could not have
  // stored is refused here too.
  snapshot_ = session::snapshot_from_files(session::snapshot_files(snapshot));
  before_pending_.reset();
  pending_add_.reset();
}

void ClientState::apply_snapshot_wire(const Json& wire) { apply_snapshot(protocol::snapshot_from_wire(wire)); }

} // namespace labbook::sim
