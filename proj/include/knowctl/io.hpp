#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "knowctl/game.hpp"
#include "knowctl/net.hpp"
#include "knowctl/simulator.hpp"
#include "knowctl/synthesis.hpp"

namespace knowctl {

using Json = nlohmann::ordered_json;

/// Throws Io.
[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Throws Syntax with the offending key.
[[nodiscard]] NetDescription net_description_from_json(const Json& j);
[[nodiscard]] Json net_description_to_json(const NetDescription& d);
[[nodiscard]] Net parse_net(std::string_view text);
[[nodiscard]] Net load_net(const std::string& path);
/// Canonical JSON of a net (declaration order, every optional section explicit).
[[nodiscard]] Json net_to_json(const Net& net);
/// Hex SHA-256 of the canonical net JSON.
[[nodiscard]] std::string net_hash(const Net& net);

[[nodiscard]] Json places_json(const Net& net, const PlaceSet& places);
[[nodiscard]] Json transitions_json(const Net& net, const TransitionSet& transitions);
[[nodiscard]] Json processes_json(const Net& net, const ProcessSet& processes);

[[nodiscard]] Json solve_to_json(const Net& net, const SafeControl& safe);

[[nodiscard]] Json controller_to_json(const Net& net, const ControllerArtifact& art);
/// Resolves names against the net; throws Syntax / Unknown* on mismatch.
[[nodiscard]] ControllerArtifact controller_from_json(const Net& net, const Json& j);
[[nodiscard]] ControllerArtifact load_controller(const Net& net, const std::string& path);

[[nodiscard]] Json event_to_json(const Net& net, const ControllerArtifact& art, const Event& ev);
/// One JSON object per line: the start configuration, then every event.
[[nodiscard]] std::string trace_to_jsonl(const ControlledSystem& sys, const Trace& trace);
[[nodiscard]] Json trace_summary_json(const Net& net, const Trace& trace, const TraceVerdict& verdict);

[[nodiscard]] Json verify_to_json(const Net& net, const VerifyVerdict& verdict);

}  // namespace knowctl
