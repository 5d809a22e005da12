#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "followsim/behavior.hpp"
#include "followsim/perception.hpp"
#include "followsim/scenario.hpp"
#include "followsim/tracker.hpp"
#include "followsim/trial.hpp"

namespace followsim {

inline constexpr const char* kProtocolVersion = "follow-sim/1";
inline constexpr std::size_t kMaxPayloadBytes = std::size_t{1} << 24;

struct WireError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Byte-level damage: truncated prefix or payload, short reads.
struct FramingError : WireError {
  using WireError::WireError;
};
// Well-framed but invalid content: bad JSON, unknown type, bad fields.
struct ProtocolError : WireError {
  using WireError::WireError;
};
struct HandshakeError : WireError {
  using WireError::WireError;
};

// Client-side per-tick reply: the motion command plus the behavior
// status the server needs for bookkeeping and outcome classification.
struct ClientCommand {
  std::int64_t tick_index = 0;
  MotionCommand motion;
  Phase phase = Phase::kIdle;
  std::optional<FailureCause> failure_cause;
  std::optional<ImageBox> target_box;  // target's box when visible this tick
  int occluded_frames_total = 0;
  std::optional<double> activation_time_s;
  std::string tracker;
};

struct HelloMsg {
  std::string protocol_version = kProtocolVersion;
};
struct ConfigMsg {
  Scenario scenario;
};
struct FrameMsg {
  FrameObservation obs;  // carries tick_index
  EgoMotionHint ego;
};
struct CommandMsg {
  ClientCommand cmd;
};
struct ResultMsg {
  TrialResult result;
};
struct ByeMsg {};

using WireMessage = std::variant<HelloMsg, ConfigMsg, FrameMsg, CommandMsg, ResultMsg, ByeMsg>;

// Canonical framing: 4-byte big-endian length prefix, then compact UTF-8
// JSON with lexicographically sorted keys and shortest round-trip
// numbers. Equal messages always produce identical bytes.
std::vector<std::uint8_t> encode_payload(const nlohmann::json& payload);
nlohmann::json message_payload(const WireMessage& m);
std::vector<std::uint8_t> encode_message(const WireMessage& m);

// Inverse of encode_message over one complete frame (prefix included).
WireMessage decode_message(const std::uint8_t* data, std::size_t size);
WireMessage message_from_payload(const nlohmann::json& payload);

}  // namespace followsim
