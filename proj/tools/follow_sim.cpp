// follow_sim: person-following simulation CLI.
//
// Subcommands: run one trial, run the full lab campaign, serve or join a
// socket session, render a results table, or compute a Fisher exact test.
// Machine-readable output goes to stdout, prose to stderr.
// Exit codes: 0 success, 1 trial failure, 2 usage/config/protocol error.

#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "followsim/harness.hpp"
#include "followsim/net.hpp"
#include "followsim/session.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted.store(true); }

using namespace followsim;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

TrackerKind tracker_from_flag(const std::string& name) {
  const auto kind = parse_tracker_name(name);
  if (!kind) {
    throw ConfigError("unknown tracker '" + name +
                      "'; valid names: baseline, bytetrack, ocsort, botsort_lite");
  }
  return *kind;
}

std::pair<std::string, int> parse_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= endpoint.size()) {
    throw ConfigError("endpoint must be host:port, got '" + endpoint + "'");
  }
  const std::string host = endpoint.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(endpoint.substr(colon + 1));
  } catch (...) {
    throw ConfigError("bad port in endpoint '" + endpoint + "'");
  }
  return {host, port};
}

int exit_code_for(const TrialResult& r) { return r.outcome == Outcome::kSuccess ? 0 : 1; }

void print_result(const TrialResult& r) {
  std::cout << trial_result_to_json(r).dump() << '\n';
}

int cmd_run(const std::string& scenario_arg, const std::string& tracker_flag, std::uint64_t seed,
            const std::string& net, bool seed_given) {
  const TrackerKind kind = tracker_from_flag(tracker_flag);
  if (net.empty()) {
    const Scenario scenario = load_scenario_arg(scenario_arg);
    const TrialResult result = run_trial(scenario, kind, seed);
    print_result(result);
    return exit_code_for(result);
  }
  // Remote mode: the server owns the scenario; the local file is only
  // validated. The server's CONFIG seed must match ours when given.
  (void)load_scenario_arg(scenario_arg);
  const auto [host, port] = parse_endpoint(net);
  TcpConnection conn = TcpConnection::connect_to(host, port);
  const TrialResult result = run_client_session(
      conn, kind, seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
  print_result(result);
  return exit_code_for(result);
}

int cmd_campaign(const std::string& distances_flag, const std::string& trackers_flag, int trials,
                 std::uint64_t seed_base, const std::string& out_path, int jobs) {
  CampaignOptions opts;
  opts.trials = trials;
  opts.seed_base = seed_base;
  opts.jobs = jobs;

  opts.distances.clear();
  std::stringstream ds(distances_flag);
  std::string item;
  while (std::getline(ds, item, ',')) {
    if (item.empty()) continue;
    opts.distances.push_back(std::stod(item));
  }
  if (opts.distances.empty()) throw ConfigError("--distances must name at least one distance");
  for (double d : opts.distances) {
    if (d != 1.5 && d != 2.5 && d != 3.5) {
      throw ConfigError("activation_distance not in {1.5,2.5,3.5}");
    }
  }

  if (trackers_flag != "all") {
    opts.trackers.clear();
    std::stringstream ts(trackers_flag);
    while (std::getline(ts, item, ',')) {
      if (item.empty()) continue;
      opts.trackers.push_back(tracker_from_flag(item));
    }
    if (opts.trackers.empty()) throw ConfigError("--trackers must name at least one tracker");
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const std::vector<TrialResult> results = run_campaign(opts, &g_interrupted);
  const std::size_t expected =
      opts.distances.size() * opts.trackers.size() * static_cast<std::size_t>(opts.trials);
  const bool complete = results.size() == expected && !g_interrupted.load();

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write results file '" + out_path + "'");
  out << campaign_csv(results, complete);
  out.close();

  if (!results.empty()) {
    std::cout << render_table(aggregate(results), TableFormat::kMarkdown);
  }
  if (!complete) {
    std::cerr << "campaign interrupted after " << results.size() << "/" << expected << " trials\n";
    return 1;
  }
  std::cerr << "wrote " << results.size() << " trials to " << out_path << "\n";
  return 0;
}

int cmd_serve(int port, const std::string& scenario_arg, std::uint64_t seed, bool seed_given,
              bool once) {
  Scenario scenario = load_scenario_arg(scenario_arg);
  if (seed_given) scenario.seed = seed;
  TcpListener listener = TcpListener::bind_port(port);
  std::cerr << "serving scenario " << scenario.scenario_id << " on port " << listener.port()
            << "\n";
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (true) {
    TcpConnection conn = [&] {
      try {
        return listener.accept_one();
      } catch (const NetError&) {
        if (g_interrupted.load()) std::exit(0);
        throw;
      }
    }();
    try {
      const TrialResult result = serve_session(conn, scenario);
      print_result(result);
    } catch (const WireError& e) {
      if (once) throw;
      std::cerr << "session error: " << e.what() << "\n";
    }
    if (once) return 0;
    if (g_interrupted.load()) return 0;
  }
}

int cmd_client(const std::string& endpoint, const std::string& tracker_flag, std::uint64_t seed,
               bool seed_given) {
  const TrackerKind kind = tracker_from_flag(tracker_flag);
  const auto [host, port] = parse_endpoint(endpoint);
  TcpConnection conn = TcpConnection::connect_to(host, port);
  const TrialResult result = run_client_session(
      conn, kind, seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
  print_result(result);
  return exit_code_for(result);
}

int cmd_table(const std::string& in_path, const std::string& format) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open results file '" + in_path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::vector<TrialResult> results = parse_results_csv(ss.str());
  if (results.empty()) throw ConfigError("no trial rows in '" + in_path + "'");
  const TableFormat fmt = format == "csv" ? TableFormat::kCsv : TableFormat::kMarkdown;
  std::cout << render_table(aggregate(results), fmt);
  return 0;
}

int cmd_fisher(long long a, long long b, long long c, long long d) {
  std::cout << format_double(fisher_exact(a, b, c, d)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic person-following simulation"};
  app.require_subcommand(1);

  const char* jobs_env = std::getenv("FOLLOW_SIM_JOBS");
  const int default_jobs = jobs_env ? std::max(1, std::atoi(jobs_env)) : 1;

  // run
  auto* run = app.add_subcommand("run", "Run a single trial");
  std::string run_scenario, run_tracker, run_net;
  std::uint64_t run_seed = 0;
  run->add_option("--scenario", run_scenario, "Scenario file or builtin (default@D, crossing@D, clear@D, timeout@D)")
      ->required();
  run->add_option("--tracker", run_tracker, "baseline | bytetrack | ocsort | botsort_lite")
      ->required();
  auto* run_seed_opt = run->add_option("--seed", run_seed, "Detector RNG seed");
  run->add_option("--net", run_net, "Run as client against host:port instead of in-process");

  // campaign
  auto* campaign = app.add_subcommand("campaign", "Run the trial grid and write a results CSV");
  std::string camp_distances = "1.5,2.5,3.5";
  std::string camp_trackers = "all";
  int camp_trials = 10;
  std::uint64_t camp_seed = 0;
  std::string camp_out = "results.csv";
  int camp_jobs = default_jobs;
  campaign->add_option("--distances", camp_distances, "Comma-separated activation distances");
  campaign->add_option("--trackers", camp_trackers, "'all' or comma-separated tracker names");
  campaign->add_option("--trials", camp_trials, "Trials per (distance, tracker) cell")
      ->check(CLI::PositiveNumber);
  campaign->add_option("--seed", camp_seed, "Base seed; trial i uses seed base+i");
  campaign->add_option("--out", camp_out, "Results CSV path");
  campaign->add_option("--jobs", camp_jobs, "Parallel trial workers (env FOLLOW_SIM_JOBS)")
      ->check(CLI::PositiveNumber);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve lockstep sessions over TCP");
  int serve_port = 0;
  std::string serve_scenario;
  std::uint64_t serve_seed = 0;
  bool serve_once = false;
  serve->add_option("--port", serve_port, "TCP port (0 = ephemeral)")->required();
  serve->add_option("--scenario", serve_scenario, "Scenario file or builtin")->required();
  auto* serve_seed_opt = serve->add_option("--seed", serve_seed, "Override the scenario seed");
  serve->add_flag("--once", serve_once, "Serve a single session, then exit");

  // client
  auto* client = app.add_subcommand("client", "Join a served session as the perception side");
  std::string client_endpoint, client_tracker;
  std::uint64_t client_seed = 0;
  client->add_option("--connect", client_endpoint, "host:port")->required();
  client->add_option("--tracker", client_tracker, "baseline | bytetrack | ocsort | botsort_lite")
      ->required();
  auto* client_seed_opt =
      client->add_option("--seed", client_seed, "Expected scenario seed (verified)");

  // table
  auto* table = app.add_subcommand("table", "Aggregate a results CSV into the success-rate table");
  std::string table_in, table_format = "markdown";
  table->add_option("--in", table_in, "Results CSV path")->required();
  table->add_option("--format", table_format, "markdown | csv")
      ->check(CLI::IsMember({"markdown", "csv"}));

  // fisher
  auto* fisher = app.add_subcommand("fisher", "Two-sided Fisher exact test on [[a,b],[c,d]]");
  long long fa = 0, fb = 0, fc = 0, fd = 0;
  fisher->add_option("--a", fa)->required();
  fisher->add_option("--b", fb)->required();
  fisher->add_option("--c", fc)->required();
  fisher->add_option("--d", fd)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(run)) {
      return cmd_run(run_scenario, run_tracker, run_seed, run_net, run_seed_opt->count() > 0);
    }
    if (app.got_subcommand(campaign)) {
      return cmd_campaign(camp_distances, camp_trackers, camp_trials, camp_seed, camp_out,
                          camp_jobs);
    }
    if (app.got_subcommand(serve)) {
      return cmd_serve(serve_port, serve_scenario, serve_seed, serve_seed_opt->count() > 0,
                       serve_once);
    }
    if (app.got_subcommand(client)) {
      return cmd_client(client_endpoint, client_tracker, client_seed,
                        client_seed_opt->count() > 0);
    }
    if (app.got_subcommand(table)) {
      return cmd_table(table_in, table_format);
    }
    if (app.got_subcommand(fisher)) {
      return cmd_fisher(fa, fb, fc, fd);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const WireError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return 2;
  } catch (const NetError& e) {
    std::cerr << "connection error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
