#pragma once

#include <string>

#include "labbook/canonical_json.hpp"
#include "labbook/session/session.hpp"

// Payload codecs shared by the server and the reference client.
namespace labbook::protocol {

inline constexpr const char* kServerVersion = "labbook/1.0";

// {"camera":{...},"measurements":[...],"mindmap":{...},"notes":"...","screenshot":"<base64>"}
Json snapshot_to_wire(const session::Snapshot& snapshot);
// Throws Error(invalid_snapshot).
session::Snapshot snapshot_from_wire(const Json& j);

// event: {"action":"add","measurement":{shape},"camera":{...},"screenshot":"<b64>"}
//        {"action":"remove","measurement_id":"...","camera":{...},"screenshot":"<b64>"}
// view_bookmark: {"camera":{...},"screenshot":"<b64>"}
Json event_to_wire(const session::InteractionEvent& event);
// `bookmark` selects the view_bookmark layout. Throws Error(invalid_input).
session::InteractionEvent event_from_wire(const Json& payload, bool bookmark);

// committed: {"commit_id","kind","measurement_id"?,"created_branch"?,"head_branch"?}
Json committed_payload(const session::RecordResult& result, const provstore::HeadState& head);

Json head_to_json(const provstore::HeadState& head);

} // namespace labbook::protocol
