#include "followsim/wire.hpp"

namespace followsim {

using nlohmann::json;

namespace {

json box_to_json(const ImageBox& b) { return json::array({b.cx, b.cy, b.w, b.h}); }

ImageBox box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ProtocolError("box must be [cx, cy, w, h]");
  return ImageBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json frame_to_json(const FrameMsg& m) {
  json j;
  j["type"] = "FRAME";
  j["tick_index"] = m.obs.tick_index;
  j["ego"] = {{"omega", m.ego.omega_applied_last_tick}, {"dt", m.ego.dt}};
  json agents = json::array();
  for (const ObservedAgent& a : m.obs.agents) {
    agents.push_back({{"agent_id", a.agent_id},
                      {"box", box_to_json(a.box)},
                      {"distance_m", a.distance_m},
                      {"occlusion", a.occlusion_fraction},
                      {"hand_raised", a.hand_raised_truth}});
  }
  j["obs"] = agents;
  return j;
}

FrameMsg frame_from_json(const json& j) {
  FrameMsg m;
  m.obs.tick_index = j.at("tick_index").get<std::int64_t>();
  m.ego.omega_applied_last_tick = j.at("ego").at("omega").get<double>();
  m.ego.dt = j.at("ego").at("dt").get<double>();
  for (const json& ja : j.at("obs")) {
    ObservedAgent a;
    a.agent_id = ja.at("agent_id").get<int>();
    a.box = box_from_json(ja.at("box"));
    a.distance_m = ja.at("distance_m").get<double>();
    a.occlusion_fraction = ja.at("occlusion").get<double>();
    a.hand_raised_truth = ja.at("hand_raised").get<bool>();
    m.obs.agents.push_back(a);
  }
  return m;
}

json command_to_json(const CommandMsg& m) {
  const ClientCommand& c = m.cmd;
  json j;
  j["type"] = "COMMAND";
  j["tick_index"] = c.tick_index;
  j["v"] = c.motion.v;
  j["omega"] = c.motion.omega;
  if (c.motion.say) j["say"] = *c.motion.say;
  j["phase"] = phase_name(c.phase);
  if (c.failure_cause) j["cause"] = failure_cause_name(*c.failure_cause);
  if (c.target_box) j["target_box"] = box_to_json(*c.target_box);
  j["occluded_frames"] = c.occluded_frames_total;
  if (c.activation_time_s) j["activation_time_s"] = *c.activation_time_s;
  j["tracker"] = c.tracker;
  return j;
}

CommandMsg command_from_json(const json& j) {
  CommandMsg m;
  ClientCommand& c = m.cmd;
  c.tick_index = j.at("tick_index").get<std::int64_t>();
  c.motion.v = j.at("v").get<double>();
  c.motion.omega = j.at("omega").get<double>();
  if (j.contains("say")) c.motion.say = j["say"].get<std::string>();
  const auto phase = parse_phase_name(j.at("phase").get<std::string>());
  if (!phase) throw ProtocolError("unknown phase '" + j.at("phase").get<std::string>() + "'");
  c.phase = *phase;
  if (j.contains("cause")) {
    const auto cause = parse_failure_cause_name(j["cause"].get<std::string>());
    if (!cause) throw ProtocolError("unknown failure cause '" + j["cause"].get<std::string>() + "'");
    c.failure_cause = cause;
  }
  if (j.contains("target_box")) c.target_box = box_from_json(j["target_box"]);
  c.occluded_frames_total = j.at("occluded_frames").get<int>();
  if (j.contains("activation_time_s")) c.activation_time_s = j["activation_time_s"].get<double>();
  c.tracker = j.at("tracker").get<std::string>();
  return m;
}

}  // namespace

json message_payload(const WireMessage& m) {
  return std::visit(
      [](const auto& msg) -> json {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, HelloMsg>) {
          return json{{"type", "HELLO"}, {"protocol_version", msg.protocol_version}};
        } else if constexpr (std::is_same_v<T, ConfigMsg>) {
          return json{{"type", "CONFIG"},
                      {"scenario", scenario_to_json(msg.scenario)},
                      {"scenario_id", msg.scenario.scenario_id}};
        } else if constexpr (std::is_same_v<T, FrameMsg>) {
          return frame_to_json(msg);
        } else if constexpr (std::is_same_v<T, CommandMsg>) {
          return command_to_json(msg);
        } else if constexpr (std::is_same_v<T, ResultMsg>) {
          return json{{"type", "RESULT"}, {"result", trial_result_to_json(msg.result)}};
        } else {
          return json{{"type", "BYE"}};
        }
      },
      m);
}

std::vector<std::uint8_t> encode_payload(const json& payload) {
  const std::string text = payload.dump();
  if (text.size() > kMaxPayloadBytes) {
    throw ProtocolError("payload exceeds 2^24 bytes");
  }
  std::vector<std::uint8_t> out;
  out.reserve(4 + text.size());
  const std::uint32_t n = static_cast<std::uint32_t>(text.size());
  out.push_back(static_cast<std::uint8_t>((n >> 24) & 0xff));
  out.push_back(static_cast<std::uint8_t>((n >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>(n & 0xff));
  out.insert(out.end(), text.begin(), text.end());
  return out;
}

std::vector<std::uint8_t> encode_message(const WireMessage& m) {
  return encode_payload(message_payload(m));
}

WireMessage message_from_payload(const json& payload) {
  if (!payload.is_object() || !payload.contains("type") || !payload["type"].is_string()) {
    throw ProtocolError("message must be an object with a string 'type'");
  }
  const std::string type = payload["type"].get<std::string>();
  try {
    if (type == "HELLO") {
      HelloMsg m;
      m.protocol_version = payload.at("protocol_version").get<std::string>();
      return m;
    }
    if (type == "CONFIG") {
      ConfigMsg m;
      m.scenario = scenario_from_json(payload.at("scenario"));
      if (payload.contains("scenario_id")) {
        m.scenario.scenario_id = payload["scenario_id"].get<std::string>();
      }
      return m;
    }
    if (type == "FRAME") return frame_from_json(payload);
    if (type == "COMMAND") return command_from_json(payload);
    if (type == "RESULT") {
      ResultMsg m;
      m.result = trial_result_from_json(payload.at("result"));
      return m;
    }
    if (type == "BYE") return ByeMsg{};
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed ") + type + " payload: " + e.what());
  } catch (const ConfigError& e) {
    throw ProtocolError(std::string("malformed ") + type + " payload: " + e.what());
  }
  throw ProtocolError("unknown message type '" + type + "'");
}

WireMessage decode_message(const std::uint8_t* data, std::size_t size) {
  if (size < 4) throw FramingError("truncated length prefix");
  const std::uint32_t n = (static_cast<std::uint32_t>(data[0]) << 24) |
                          (static_cast<std::uint32_t>(data[1]) << 16) |
                          (static_cast<std::uint32_t>(data[2]) << 8) |
                          static_cast<std::uint32_t>(data[3]);
  if (n > kMaxPayloadBytes) throw ProtocolError("payload exceeds 2^24 bytes");
  if (size < 4 + static_cast<std::size_t>(n)) {
    throw FramingError("truncated payload: prefix claims " + std::to_string(n) + " bytes, " +
                       std::to_string(size - 4) + " delivered");
  }
  json payload;
  try {
    payload = json::parse(data + 4, data + 4 + n);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON payload: ") + e.what());
  }
  return message_from_payload(payload);
}

}  // namespace followsim
