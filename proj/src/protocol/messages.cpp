#include "labbook/protocol/messages.hpp"

#include "labbook/encoding.hpp"
#include "labbook/error.hpp"
#include "labbook/vftsim/measurement_json.hpp"

namespace labbook::protocol {

namespace {

const Json& need(const Json& j, const char* key, Errc code) {
  if (!j.is_object()) throw Error(code, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw Error(code, std::string("missing field '") + key + "'");
  return *it;
}

std::string decode_screenshot(const Json& j, Errc code) {
  if (!j.is_string()) throw Error(code, "screenshot must be a base64 string");
  auto bytes = base64_decode(j.get<std::string>());
  if (!bytes) throw Error(code, "screenshot is not valid base64");
  return *bytes;
}

} // namespace

Json snapshot_to_wire(const session::Snapshot& s) {
  return {{"measurements", vftsim::measurements_to_json(s.measurements)},
          {"camera", vftsim::camera_to_json(s.camera)},
          {"screenshot", base64_encode(s.screenshot)},
          {"mindmap", session::mindmap_to_json(s.mindmap)},
          {"notes", s.notes}};
}

session::Snapshot snapshot_from_wire(const Json& j) {
  constexpr auto code = Errc::invalid_snapshot;
  session::Snapshot s;
  try {
    s.measurements = vftsim::measurements_from_json(need(j, "measurements", code));
    s.camera = vftsim::camera_from_json(need(j, "camera", code));
    s.screenshot = decode_screenshot(need(j, "screenshot", code), code);
    session::validate_screenshot(s.screenshot);
    s.mindmap = session::mindmap_from_json(need(j, "mindmap", code));
    const auto& notes = need(j, "notes", code);
    if (!notes.is_string()) throw Error(code, "notes must be a string");
    s.notes = notes.get<std::string>();
  } catch (const Error& e) {
    if (e.code() == code) throw;
    throw Error(code, e.what());
  }
  return s;
}

Json event_to_wire(const session::InteractionEvent& e) {
  Json j = {{"camera", vftsim::camera_to_json(e.camera)}, {"screenshot", base64_encode(e.screenshot)}};
  if (e.action == session::Action::add) {
    j["action"] = "add";
    j["measurement"] = e.shape ? vftsim::shape_to_json(*e.shape) : Json(nullptr);
  } else if (e.action == session::Action::remove) {
    j["action"] = "remove";
    j["measurement_id"] = e.remove_id;
  }
  return j;
}

session::InteractionEvent event_from_wire(const Json& payload, bool bookmark) {
  constexpr auto code = Errc::invalid_input;
  session::InteractionEvent e;
  e.camera = vftsim::camera_from_json(need(payload, "camera", code));
  e.screenshot = decode_screenshot(need(payload, "screenshot", code), code);
  if (bookmark) {
    e.action = session::Action::bookmark;
    return e;
  }
  const auto& action = need(payload, "action", code);
  if (action == "add") {
    e.action = session::Action::add;
    e.shape = vftsim::shape_from_json(need(payload, "measurement", code));
  } else if (action == "remove") {
    e.action = session::Action::remove;
    const auto& id = need(payload, "measurement_id", code);
    if (!id.is_string()) throw Error(code, "measurement_id must be a string");
    e.remove_id = id.get<std::string>();
  } else {
    throw Error(code, "action must be \"add\" or \"remove\"");
  }
  return e;
}

Json head_to_json(const provstore::HeadState& head) {
  return {{"branch", head.branch ? Json(*head.branch) : Json(nullptr)}, {"commit", head.commit.hex()}};
}

Json committed_payload(const session::RecordResult& r, const provstore::HeadState& head) {
  Json j = {{"commit_id", r.commit.id.hex()}, {"kind", std::string(provstore::kind_name(r.commit.kind))}};
  if (r.measurement_id) j["measurement_id"] = *r.measurement_id;
  if (r.created_branch) j["created_branch"] = *r.created_branch;
  j["head"] = head_to_json(head);
  return j;
}

} // namespace labbook::protocol
