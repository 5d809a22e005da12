#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "followsim/behavior.hpp"
#include "followsim/camera.hpp"
#include "followsim/net.hpp"
#include "followsim/rng.hpp"
#include "followsim/scenario.hpp"
#include "followsim/tracker.hpp"
#include "followsim/trial.hpp"
#include "followsim/wire.hpp"

namespace followsim {

// Truth boxes captured at a frame the behavior reported a visible target;
// classification compares the reported box against these.
struct TruthBox {
  int agent_id = 0;
  bool is_user = false;
  ImageBox box;
};

// Server half: owns the world, renders truth frames, applies commands,
// classifies the outcome when the trial ends. Ground truth never crosses
// into tracker or behavior decisions; it is only read here for scoring.
class ServerSession {
 public:
  explicit ServerSession(Scenario scenario);

  // Frame for the current tick; nullopt once the trial is finished.
  std::optional<FrameMsg> next_frame();
  void apply_command(const ClientCommand& cmd);  // ProtocolError on tick mismatch
  void abort(const std::string& reason);

  bool finished() const { return finished_; }
  const TrialResult& result() const { return result_; }
  const Scenario& scenario() const { return scenario_; }

 private:
  void finish(const ClientCommand* last_cmd, bool timed_out);

  Scenario scenario_;
  CameraModel cam_;
  WorldState world_;
  double last_omega_ = 0.0;
  std::int64_t awaiting_tick_ = -1;
  bool finished_ = false;
  TrialResult result_;

  // Live truth for the tick we are waiting on, and the snapshot taken at
  // the most recent tick whose command carried a target box.
  std::vector<TruthBox> current_truth_;
  std::optional<ImageBox> decisive_target_box_;
  std::vector<TruthBox> decisive_truth_;
  std::optional<double> activation_time_s_;
  int occluded_frames_ = 0;
  std::string tracker_name_;
  Phase last_phase_ = Phase::kIdle;
  std::optional<FailureCause> last_cause_;
};

// Client half: synthetic detector, tracker, behavior machine.
class ClientSession {
 public:
  ClientSession(const Scenario& scenario, TrackerKind kind);

  ClientCommand on_frame(const FrameMsg& frame);

  const BehaviorMachine& behavior() const { return behavior_; }

 private:
  Scenario scenario_;
  GaussianRng rng_;
  Tracker tracker_;
  BehaviorMachine behavior_;
};

// The same state machines wired function-call to function-call; the
// socket path must yield an identical result.
TrialResult run_trial(Scenario scenario, TrackerKind kind, std::uint64_t seed);

// Socket endpoints. The server owns the scenario (sent via CONFIG); the
// client owns the tracker choice and seeds its detector RNG from the
// CONFIG seed. expect_seed, when set, is verified against CONFIG.
TrialResult serve_session(TcpConnection& conn, Scenario scenario);
TrialResult run_client_session(TcpConnection& conn, TrackerKind kind,
                               std::optional<std::uint64_t> expect_seed = std::nullopt);

}  // namespace followsim
