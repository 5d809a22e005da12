#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "followsim/session.hpp"
#include "followsim/trial.hpp"

namespace followsim {

// Two-sided Fisher exact test on the 2x2 table [[a, b], [c, d]]: the sum
// of hypergeometric probabilities of all same-margin tables whose point
// probability does not exceed the observed one (relative slack 1e-12).
// Degenerate all-zero margins give 1.0.
double fisher_exact(long long a, long long b, long long c, long long d);

struct CellStats {
  int trials = 0;
  int successes = 0;
  double duration_sum = 0.0;
  long long occluded_sum = 0;

  double success_rate() const { return trials ? 100.0 * successes / trials : 0.0; }
  double mean_duration() const { return trials ? duration_sum / trials : 0.0; }
  double mean_occluded() const { return trials ? static_cast<double>(occluded_sum) / trials : 0.0; }
};

struct MetricsTable {
  std::vector<double> distances;          // ascending
  std::vector<std::string> trackers;      // ByteTrack, BoTSORT-lite, OC-SORT, Baseline order
  std::map<std::pair<int, int>, CellStats> cells;  // (distance idx, tracker idx)
  std::vector<double> tracker_averages;   // unweighted mean of per-distance rates

  const CellStats& cell(int d, int t) const { return cells.at({d, t}); }
};

std::string tracker_display_name(const std::string& internal_name);

MetricsTable aggregate(const std::vector<TrialResult>& results);

enum class TableFormat { kCsv, kMarkdown };
std::string render_table(const MetricsTable& m, TableFormat format);

struct CampaignOptions {
  std::vector<double> distances{1.5, 2.5, 3.5};
  std::vector<TrackerKind> trackers = all_tracker_kinds();
  int trials = 10;
  std::uint64_t seed_base = 0;
  int jobs = 1;
};

// Full grid, row-ordered by (distance, tracker, trial); trial seeds are
// seed_base + row index so any row can be reproduced in isolation.
// `interrupt`, when set, stops between trials; completed rows are kept.
std::vector<TrialResult> run_campaign(const CampaignOptions& opts,
                                      const std::atomic<bool>* interrupt = nullptr);

// Results CSV (header + one row per trial, trailing newline). A campaign
// cut short ends with an INCOMPLETE marker row.
std::string campaign_csv(const std::vector<TrialResult>& results, bool complete);
std::vector<TrialResult> parse_results_csv(const std::string& text);

}  // namespace followsim
