#include "followsim/trial.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "followsim/world.hpp"

namespace followsim {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kSuccess:
      return "success";
    case Outcome::kFailure:
      return "failure";
    case Outcome::kAborted:
      return "aborted";
  }
  return "unknown";
}

std::optional<Outcome> parse_outcome_name(const std::string& s) {
  if (s == "success") return Outcome::kSuccess;
  if (s == "failure") return Outcome::kFailure;
  if (s == "aborted") return Outcome::kAborted;
  return std::nullopt;
}

nlohmann::json trial_result_to_json(const TrialResult& r) {
  nlohmann::json j;
  j["scenario_id"] = r.scenario_id;
  j["distance_m"] = r.distance_m;
  j["tracker"] = r.tracker;
  j["seed"] = r.seed;
  j["outcome"] = outcome_name(r.outcome);
  if (r.failure_cause) {
    j["failure_cause"] = failure_cause_name(*r.failure_cause);
  } else {
    j["failure_cause"] = nullptr;
  }
  j["duration_s"] = r.duration_s;
  if (r.activation_time_s) {
    j["activation_time_s"] = *r.activation_time_s;
  } else {
    j["activation_time_s"] = nullptr;
  }
  j["occluded_frames"] = r.occluded_frames;
  if (r.final_distance_m) {
    j["final_distance_m"] = *r.final_distance_m;
  } else {
    j["final_distance_m"] = nullptr;
  }
  return j;
}

TrialResult trial_result_from_json(const nlohmann::json& j) {
  TrialResult r;
  r.scenario_id = j.at("scenario_id").get<std::string>();
  r.distance_m = j.at("distance_m").get<double>();
  r.tracker = j.at("tracker").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  const auto outcome = parse_outcome_name(j.at("outcome").get<std::string>());
  if (!outcome) throw ConfigError("bad outcome in trial result");
  r.outcome = *outcome;
  if (j.contains("failure_cause") && !j["failure_cause"].is_null()) {
    r.failure_cause = parse_failure_cause_name(j["failure_cause"].get<std::string>());
  }
  r.duration_s = j.at("duration_s").get<double>();
  if (j.contains("activation_time_s") && !j["activation_time_s"].is_null()) {
    r.activation_time_s = j["activation_time_s"].get<double>();
  }
  r.occluded_frames = j.at("occluded_frames").get<int>();
  if (j.contains("final_distance_m") && !j["final_distance_m"].is_null()) {
    r.final_distance_m = j["final_distance_m"].get<double>();
  }
  return r;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string trial_result_csv_header() {
  return "scenario_id,distance_m,tracker,seed,outcome,failure_cause,duration_s,"
         "activation_time_s,occluded_frames,final_distance_m";
}

std::string trial_result_csv_row(const TrialResult& r) {
  std::ostringstream os;
  os << csv_escape(r.scenario_id) << ',' << format_double(r.distance_m) << ','
     << csv_escape(r.tracker) << ',' << r.seed << ',' << outcome_name(r.outcome) << ','
     << (r.failure_cause ? failure_cause_name(*r.failure_cause) : "") << ','
     << format_double(r.duration_s) << ','
     << (r.activation_time_s ? format_double(*r.activation_time_s) : "") << ','
     << r.occluded_frames << ','
     << (r.final_distance_m ? format_double(*r.final_distance_m) : "");
  return os.str();
}

TrialResult trial_result_from_csv_row(const std::string& line) {
  const auto f = split_csv_line(line);
  if (f.size() != 10) throw ConfigError("results row must have 10 fields");
  TrialResult r;
  r.scenario_id = f[0];
  r.distance_m = std::stod(f[1]);
  r.tracker = f[2];
  r.seed = std::stoull(f[3]);
  const auto outcome = parse_outcome_name(f[4]);
  if (!outcome) throw ConfigError("bad outcome '" + f[4] + "' in results row");
  r.outcome = *outcome;
  if (!f[5].empty()) r.failure_cause = parse_failure_cause_name(f[5]);
  r.duration_s = std::stod(f[6]);
  if (!f[7].empty()) r.activation_time_s = std::stod(f[7]);
  r.occluded_frames = std::stoi(f[8]);
  if (!f[9].empty()) r.final_distance_m = std::stod(f[9]);
  return r;
}

}  // namespace followsim
