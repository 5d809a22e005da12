#include "followsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace followsim {

double fisher_exact(long long a, long long b, long long c, long long d) {
  if (a < 0 || b < 0 || c < 0 || d < 0) throw ConfigError("fisher counts must be non-negative");
  const long long n = a + b + c + d;
  if (n == 0) return 1.0;

  const long long r1 = a + b;
  const long long r2 = c + d;
  const long long c1 = a + c;

  std::vector<long double> log_fact(static_cast<std::size_t>(n) + 1, 0.0L);
  for (long long i = 1; i <= n; ++i) {
    log_fact[i] = log_fact[i - 1] + std::log(static_cast<long double>(i));
  }
  const auto log_choose = [&](long long nn, long long kk) -> long double {
    return log_fact[nn] - log_fact[kk] - log_fact[nn - kk];
  };
  const long double log_denom = log_choose(n, c1);
  const auto log_prob = [&](long long k) -> long double {
    return log_choose(r1, k) + log_choose(r2, c1 - k) - log_denom;
  };

  const long long k_lo = std::max(0LL, c1 - r2);
  const long long k_hi = std::min(r1, c1);
  const long double log_p_obs = log_prob(a);
  // Inclusion threshold with a hair of relative slack so exact-mirror
  // tables are never dropped to rounding.
  const long double threshold = log_p_obs + 1e-12L;

  long double p = 0.0L;
  for (long long k = k_lo; k <= k_hi; ++k) {
    if (log_prob(k) <= threshold) p += std::exp(log_prob(k));
  }
  return static_cast<double>(std::min(p, 1.0L));
}

std::string tracker_display_name(const std::string& internal_name) {
  if (internal_name == "bytetrack") return "ByteTrack";
  if (internal_name == "botsort_lite") return "BoTSORT-lite";
  if (internal_name == "ocsort") return "OC-SORT";
  if (internal_name == "baseline") return "Baseline";
  return internal_name;
}

MetricsTable aggregate(const std::vector<TrialResult>& results) {
  if (results.empty()) throw ConfigError("aggregate needs at least one trial result");
  MetricsTable m;
  for (const TrackerKind k : all_tracker_kinds()) m.trackers.push_back(tracker_name(k));
  for (const TrialResult& r : results) {
    if (std::find(m.distances.begin(), m.distances.end(), r.distance_m) == m.distances.end()) {
      m.distances.push_back(r.distance_m);
    }
  }
  std::sort(m.distances.begin(), m.distances.end());

  for (const TrialResult& r : results) {
    const auto d_it = std::find(m.distances.begin(), m.distances.end(), r.distance_m);
    const auto t_it = std::find(m.trackers.begin(), m.trackers.end(), r.tracker);
    if (t_it == m.trackers.end()) continue;  // foreign tracker name
    const int di = static_cast<int>(d_it - m.distances.begin());
    const int ti = static_cast<int>(t_it - m.trackers.begin());
    CellStats& cell = m.cells[{di, ti}];
    cell.trials += 1;
    if (r.outcome == Outcome::kSuccess) cell.successes += 1;
    cell.duration_sum += r.duration_s;
    cell.occluded_sum += r.occluded_frames;
  }

  m.tracker_averages.assign(m.trackers.size(), 0.0);
  for (std::size_t ti = 0; ti < m.trackers.size(); ++ti) {
    double sum = 0.0;
    int cells_with_data = 0;
    for (std::size_t di = 0; di < m.distances.size(); ++di) {
      const auto it = m.cells.find({static_cast<int>(di), static_cast<int>(ti)});
      if (it == m.cells.end() || it->second.trials == 0) continue;
      sum += it->second.success_rate();
      ++cells_with_data;
    }
    m.tracker_averages[ti] = cells_with_data ? sum / cells_with_data : 0.0;
  }
  return m;
}

namespace {

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string distance_label(double d) { return one_decimal(d) + "m"; }

}  // namespace

std::string render_table(const MetricsTable& m, TableFormat format) {
  std::ostringstream os;
  if (format == TableFormat::kMarkdown) {
    os << "| Distance |";
    for (const std::string& t : m.trackers) os << ' ' << tracker_display_name(t) << " |";
    os << '\n' << "|---|";
    for (std::size_t i = 0; i < m.trackers.size(); ++i) os << "---|";
    os << '\n';
    for (std::size_t di = 0; di < m.distances.size(); ++di) {
      os << "| " << distance_label(m.distances[di]) << " |";
      for (std::size_t ti = 0; ti < m.trackers.size(); ++ti) {
        const auto it = m.cells.find({static_cast<int>(di), static_cast<int>(ti)});
        os << ' ' << (it != m.cells.end() && it->second.trials ? one_decimal(it->second.success_rate()) : "-")
           << " |";
      }
      os << '\n';
    }
    os << "| Average |";
    for (double avg : m.tracker_averages) os << ' ' << one_decimal(avg) << " |";
    os << '\n';
  } else {
    os << "distance";
    for (const std::string& t : m.trackers) os << ',' << tracker_display_name(t);
    os << '\n';
    for (std::size_t di = 0; di < m.distances.size(); ++di) {
      os << distance_label(m.distances[di]);
      for (std::size_t ti = 0; ti < m.trackers.size(); ++ti) {
        const auto it = m.cells.find({static_cast<int>(di), static_cast<int>(ti)});
        os << ','
           << (it != m.cells.end() && it->second.trials ? one_decimal(it->second.success_rate()) : "");
      }
      os << '\n';
    }
    os << "Average";
    for (double avg : m.tracker_averages) os << ',' << one_decimal(avg);
    os << '\n';
  }
  return os.str();
}

std::vector<TrialResult> run_campaign(const CampaignOptions& opts,
                                      const std::atomic<bool>* interrupt) {
  struct Job {
    double distance;
    TrackerKind tracker;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  std::uint64_t row = 0;
  for (double d : opts.distances) {
    for (TrackerKind t : opts.trackers) {
      for (int i = 0; i < opts.trials; ++i) {
        jobs.push_back({d, t, opts.seed_base + row});
        ++row;
      }
    }
  }

  std::vector<TrialResult> results(jobs.size());
  std::vector<char> done(jobs.size(), 0);

  const auto run_one = [&](std::size_t idx) {
    char name[32];
    std::snprintf(name, sizeof(name), "default@%.1f", jobs[idx].distance);
    const Scenario scenario = builtin_scenario(name);
    results[idx] = run_trial(scenario, jobs[idx].tracker, jobs[idx].seed);
    done[idx] = 1;
  };

  const int workers = std::max(1, opts.jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (interrupt && interrupt->load()) break;
      run_one(i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          if (interrupt && interrupt->load()) return;
          run_one(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Keep the completed prefix only, so row order stays (distance,
  // tracker, trial) even when interrupted mid-grid.
  std::vector<TrialResult> out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!done[i]) break;
    out.push_back(results[i]);
  }
  return out;
}

std::string campaign_csv(const std::vector<TrialResult>& results, bool complete) {
  std::ostringstream os;
  os << trial_result_csv_header() << '\n';
  for (const TrialResult& r : results) os << trial_result_csv_row(r) << '\n';
  if (!complete) os << "INCOMPLETE,,,,,,,,,\n";
  return os.str();
}

std::vector<TrialResult> parse_results_csv(const std::string& text) {
  std::vector<TrialResult> out;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == trial_result_csv_header()) continue;
    }
    if (line.rfind("INCOMPLETE", 0) == 0) continue;
    out.push_back(trial_result_from_csv_row(line));
  }
  return out;
}

}  // namespace followsim
