#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "followsim/behavior.hpp"

namespace followsim {

enum class Outcome { kSuccess, kFailure, kAborted };

const char* outcome_name(Outcome o);
std::optional<Outcome> parse_outcome_name(const std::string& s);

struct TrialResult {
  std::string scenario_id;
  double distance_m = 0.0;
  std::string tracker;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::kAborted;
  std::optional<FailureCause> failure_cause;
  double duration_s = 0.0;
  std::optional<double> activation_time_s;
  int occluded_frames = 0;
  std::optional<double> final_distance_m;  // robot to user at termination

  bool operator==(const TrialResult&) const = default;
};

nlohmann::json trial_result_to_json(const TrialResult& r);
TrialResult trial_result_from_json(const nlohmann::json& j);

// Results CSV row (no newline); shortest round-trip number rendering so
// identical results are byte-identical.
std::string trial_result_csv_header();
std::string trial_result_csv_row(const TrialResult& r);
TrialResult trial_result_from_csv_row(const std::string& line);

}  // namespace followsim
