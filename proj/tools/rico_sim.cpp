// rico_sim: headless scenario runner and teleoperation server.
//
//   rico_sim --config configs/room.yaml --scenario patrol --seed 42 --metrics out.json
//   rico_sim --config configs/room.yaml --serve 127.0.0.1:8765 --realtime

#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rico/config.hpp"
#include "rico/gateway.hpp"
#include "rico/scenarios.hpp"
#include "rico/world_loop.hpp"

namespace {

enum Exit { kOk = 0, kAborted = 1, kUsage = 2, kIncomplete = 3, kServeFailed = 4 };

int serve(const rico::RuntimeConfig& cfg, const std::string& scenario, const std::string& endpoint, bool realtime,
          double duration) {
  auto [host, port] = rico::parse_endpoint(endpoint);
  rico::WorldLoop loop(cfg, {realtime, duration});
  if (scenario == "patrol" || scenario == "fall") loop.runtime().submit_patrol();
  else if (scenario == "transport")
    loop.runtime().submit_transport(rico::parse(cfg.transport.command), cfg.transport.requester);

  rico::Gateway gateway(loop, host, port);
  gateway.stop_on_signals();
  loop.set_on_finish([&gateway] { gateway.stop(); });
  std::cerr << "rico_sim: serving ws://" << host << ":" << gateway.port() << " ("
            << (realtime ? "realtime" : "fast") << ")\n";
  loop.start();
  gateway.run();
  loop.stop();
  loop.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rico behavior-stack simulator"};
  std::string config_path;
  std::string scenario = "idle";
  std::uint64_t seed = 0;
  bool seed_given = false;
  double duration = 0.0;
  std::string metrics_path;
  std::string events_path;
  std::string serve_at;
  int trials = 1000;
  bool realtime = false;
  bool fast = false;

  app.add_option("--config", config_path, "World and scenario YAML")->required();
  app.add_option("--scenario", scenario, "patrol, transport, fall, comprehension or idle")
      ->check(CLI::IsMember({"patrol", "transport", "fall", "comprehension", "idle"}));
  app.add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t s) { seed = s, seed_given = true; }, "RNG seed (default: world.seed)");
  app.add_option("--duration", duration, "Sim seconds to run (default: scenarios.budget_s)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--metrics", metrics_path, "Write the metrics JSON here");
  app.add_option("--events", events_path, "Write the event log (JSON lines) here");
  app.add_option("--trials", trials, "Comprehension trials")->check(CLI::PositiveNumber);
  app.add_option("--serve", serve_at, "Serve telemetry on ADDRESS:PORT");
  auto* rt_flag = app.add_flag("--realtime", realtime, "Pace the served world to the wall clock");
  auto* fast_flag = app.add_flag("--fast", fast, "Run as fast as possible (headless runs always do)");
  rt_flag->excludes(fast_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  rico::RuntimeConfig cfg;
  try {
    cfg = rico::load_config(config_path);
  } catch (const rico::ConfigError& e) {
    std::cerr << "rico_sim: " << e.what() << "\n";
    return kUsage;
  }
  if (!seed_given) seed = cfg.world.rng_seed;
  cfg.world.rng_seed = seed;

  if (!serve_at.empty()) {
    try {
      return serve(cfg, scenario, serve_at, !fast, duration);
    } catch (const std::exception& e) {
      std::cerr << "rico_sim: " << e.what() << "\n";
      return kServeFailed;
    }
  }

  const auto wall0 = std::chrono::steady_clock::now();
  rico::ScenarioRun run;
  try {
    run = rico::run_scenario(cfg, scenario, seed, duration, trials);
  } catch (const std::exception& e) {
    std::cerr << "rico_sim: " << e.what() << "\n";
    return kUsage;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

  if (!events_path.empty()) {
    std::ofstream out(events_path);
    if (!out) {
      std::cerr << "rico_sim: cannot write " << events_path << "\n";
      return kUsage;
    }
    for (const auto& e : run.events) out << rico::EventLog::to_json(e).dump() << '\n';
  }

  nlohmann::json metrics = rico::metrics_json(run, events_path);
  metrics["config"] = config_path;
  metrics["wall_clock_s"] = wall;
  if (!metrics_path.empty()) {
    std::ofstream out(metrics_path);
    if (!out) {
      std::cerr << "rico_sim: cannot write " << metrics_path << "\n";
      return kUsage;
    }
    out << metrics.dump(2) << '\n';
  }

  std::cout << "scenario=" << run.scenario << " seed=" << run.seed << " outcome=" << run.outcome;
  if (run.comprehension) std::cout << " success_rate=" << run.comprehension->success_rate;
  if (run.hazard_reported) std::cout << " hazard_reported=true";
  for (const auto& r : run.reasons) std::cout << " reason=" << r;
  std::cout << " sim_time=" << run.sim_time << "\n";

  if (run.outcome == "aborted") return kAborted;
  if (run.outcome == "incomplete" && duration <= 0.0) return kIncomplete;
  return kOk;
}
