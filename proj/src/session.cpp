#include "followsim/session.hpp"

#include <algorithm>
#include <cmath>

namespace followsim {

namespace {

// Identity check at the decisive frame: the reported target box must
// overlap the true user strictly better than every other agent.
bool target_matches_user(const ImageBox& target, const std::vector<TruthBox>& truths) {
  double user_iou = -1.0;
  double best_other = 0.0;
  for (const TruthBox& t : truths) {
    const double overlap = iou(target, t.box);
    if (t.is_user) {
      user_iou = overlap;
    } else {
      best_other = std::max(best_other, overlap);
    }
  }
  if (user_iou < 0.0) return false;  // user not even in view
  return user_iou > best_other;
}

}  // namespace

ServerSession::ServerSession(Scenario scenario) : scenario_(std::move(scenario)) {
  world_ = scenario_.initial_world();
  result_.scenario_id = scenario_.scenario_id;
  result_.distance_m = scenario_.activation_distance;
  result_.seed = scenario_.seed;
  result_.outcome = Outcome::kAborted;
}

std::optional<FrameMsg> ServerSession::next_frame() {
  if (finished_) return std::nullopt;
  if (world_.tick_index >= scenario_.max_ticks()) {
    finish(nullptr, /*timed_out=*/true);
    return std::nullopt;
  }
  FrameMsg frame;
  frame.obs = render_frame(world_, cam_);
  frame.ego.omega_applied_last_tick = last_omega_;
  frame.ego.dt = scenario_.dt;
  awaiting_tick_ = world_.tick_index;

  current_truth_.clear();
  for (const AgentState& a : world_.agents) {
    const auto box = project_agent(world_.robot, a, cam_);
    if (!box) continue;
    current_truth_.push_back(TruthBox{a.agent_id, a.is_user, *box});
  }
  return frame;
}

void ServerSession::apply_command(const ClientCommand& cmd) {
  if (finished_) throw ProtocolError("COMMAND received after RESULT");
  if (cmd.tick_index != awaiting_tick_) {
    throw ProtocolError("alternation violation: expected COMMAND for tick " +
                        std::to_string(awaiting_tick_) + ", got tick " +
                        std::to_string(cmd.tick_index));
  }
  awaiting_tick_ = -1;

  tracker_name_ = cmd.tracker;
  last_phase_ = cmd.phase;
  last_cause_ = cmd.failure_cause;
  occluded_frames_ = cmd.occluded_frames_total;
  if (cmd.activation_time_s && !activation_time_s_) activation_time_s_ = cmd.activation_time_s;
  if (cmd.target_box) {
    decisive_target_box_ = cmd.target_box;
    decisive_truth_ = current_truth_;
  }

  if (cmd.phase == Phase::kArrived || cmd.phase == Phase::kFailed) {
    finish(&cmd, /*timed_out=*/false);
    return;
  }

  MotionCommand motion = cmd.motion;
  motion.v = std::clamp(motion.v, -scenario_.control.v_max, scenario_.control.v_max);
  motion.omega = std::clamp(motion.omega, -scenario_.control.omega_max, scenario_.control.omega_max);
  world_ = step_world(world_, motion, scenario_.dt);
  last_omega_ = motion.omega;
}

void ServerSession::abort(const std::string&) {
  finished_ = true;
  result_.outcome = Outcome::kAborted;
  result_.failure_cause.reset();
  result_.tracker = tracker_name_;
  result_.duration_s = world_.sim_time;
  result_.occluded_frames = occluded_frames_;
  result_.activation_time_s = activation_time_s_;
}

void ServerSession::finish(const ClientCommand* last_cmd, bool timed_out) {
  finished_ = true;
  result_.tracker = tracker_name_;
  result_.duration_s = world_.sim_time;
  result_.occluded_frames = occluded_frames_;
  result_.activation_time_s = activation_time_s_;
  for (const AgentState& a : world_.agents) {
    if (a.is_user) {
      result_.final_distance_m = std::hypot(a.x - world_.robot.x, a.y - world_.robot.y);
    }
  }

  const Phase phase = last_cmd ? last_cmd->phase : last_phase_;
  const bool activated = activation_time_s_.has_value();

  if (!activated) {
    result_.outcome = Outcome::kFailure;
    result_.failure_cause = FailureCause::kTimeout;
    return;
  }
  const bool identity_ok =
      decisive_target_box_ && target_matches_user(*decisive_target_box_, decisive_truth_);
  if (phase == Phase::kArrived) {
    if (identity_ok) {
      result_.outcome = Outcome::kSuccess;
      result_.failure_cause.reset();
    } else {
      result_.outcome = Outcome::kFailure;
      result_.failure_cause = FailureCause::kIdSwitch;
    }
    return;
  }
  // Lost the target (patience expiry) or ran out the simulation clock
  // while still chasing: identity at the last-seen frame decides whether
  // this was an ID switch.
  (void)timed_out;
  result_.outcome = Outcome::kFailure;
  result_.failure_cause = identity_ok ? FailureCause::kLost : FailureCause::kIdSwitch;
  if (!decisive_target_box_) result_.failure_cause = FailureCause::kLost;
}

ClientSession::ClientSession(const Scenario& scenario, TrackerKind kind)
    : scenario_(scenario),
      rng_(scenario.seed),
      tracker_(kind,
               [&] {
                 TrackerParams p;
                 p.max_age = scenario.control.patience_frames;
                 return p;
               }()),
      behavior_(scenario.control) {}

ClientCommand ClientSession::on_frame(const FrameMsg& frame) {
  const std::vector<Detection> dets = detect(frame.obs, scenario_.noise, rng_);
  const std::vector<Track> tracks = tracker_.update(dets, frame.ego);
  const MotionCommand motion = behavior_.step(tracks, dets, scenario_.dt);

  const BehaviorState& st = behavior_.state();
  ClientCommand cmd;
  cmd.tick_index = frame.obs.tick_index;
  cmd.motion = motion;
  cmd.phase = st.phase;
  cmd.failure_cause = st.failure_cause;
  cmd.occluded_frames_total = st.total_occluded_frames;
  cmd.activation_time_s = st.activation_time_s;
  cmd.tracker = tracker_name(tracker_.kind());
  if (st.target_track_id) {
    for (const Track& t : tracks) {
      if (t.track_id == *st.target_track_id) cmd.target_box = t.last_observation;
    }
  }
  return cmd;
}

TrialResult run_trial(Scenario scenario, TrackerKind kind, std::uint64_t seed) {
  scenario.seed = seed;
  ServerSession server(scenario);
  ClientSession client(scenario, kind);
  while (auto frame = server.next_frame()) {
    server.apply_command(client.on_frame(*frame));
  }
  return server.result();
}

TrialResult serve_session(TcpConnection& conn, Scenario scenario) {
  ServerSession server(std::move(scenario));
  const WireMessage hello = conn.recv_message();
  const HelloMsg* h = std::get_if<HelloMsg>(&hello);
  if (!h) throw HandshakeError("expected HELLO");
  if (h->protocol_version != kProtocolVersion) {
    throw HandshakeError("protocol version mismatch: peer speaks '" + h->protocol_version +
                         "', this side speaks '" + kProtocolVersion + "'");
  }
  conn.send_message(HelloMsg{});
  conn.send_message(ConfigMsg{server.scenario()});
  try {
    while (auto frame = server.next_frame()) {
      conn.send_message(*frame);
      const WireMessage reply = conn.recv_message();
      const CommandMsg* cmd = std::get_if<CommandMsg>(&reply);
      if (!cmd) throw ProtocolError("expected COMMAND in reply to FRAME");
      server.apply_command(cmd->cmd);
    }
    conn.send_message(ResultMsg{server.result()});
    conn.send_message(ByeMsg{});
  } catch (const FramingError& e) {
    server.abort(e.what());
  }
  return server.result();
}

TrialResult run_client_session(TcpConnection& conn, TrackerKind kind,
                               std::optional<std::uint64_t> expect_seed) {
  conn.send_message(HelloMsg{});
  const WireMessage hello = conn.recv_message();
  const HelloMsg* h = std::get_if<HelloMsg>(&hello);
  if (!h) throw HandshakeError("expected HELLO");
  if (h->protocol_version != kProtocolVersion) {
    throw HandshakeError("protocol version mismatch: peer speaks '" + h->protocol_version +
                         "', this side speaks '" + kProtocolVersion + "'");
  }
  const WireMessage config = conn.recv_message();
  const ConfigMsg* cfg = std::get_if<ConfigMsg>(&config);
  if (!cfg) throw ProtocolError("expected CONFIG after HELLO");
  if (expect_seed && cfg->scenario.seed != *expect_seed) {
    throw HandshakeError("seed mismatch: server scenario uses " +
                         std::to_string(cfg->scenario.seed) + ", client requested " +
                         std::to_string(*expect_seed));
  }
  ClientSession client(cfg->scenario, kind);

  TrialResult aborted;
  aborted.scenario_id = cfg->scenario.scenario_id;
  aborted.distance_m = cfg->scenario.activation_distance;
  aborted.tracker = tracker_name(kind);
  aborted.seed = cfg->scenario.seed;
  aborted.outcome = Outcome::kAborted;

  try {
    while (true) {
      const WireMessage msg = conn.recv_message();
      if (const FrameMsg* frame = std::get_if<FrameMsg>(&msg)) {
        conn.send_message(CommandMsg{client.on_frame(*frame)});
        continue;
      }
      if (const ResultMsg* result = std::get_if<ResultMsg>(&msg)) {
        try {
          const WireMessage bye = conn.recv_message();
          (void)bye;
        } catch (const FramingError&) {
          // RESULT already carries everything; a missing BYE is tolerated.
        }
        return result->result;
      }
      throw ProtocolError("unexpected message mid-session");
    }
  } catch (const FramingError&) {
    return aborted;  // peer went away mid-trial
  }
}

}  // namespace followsim
