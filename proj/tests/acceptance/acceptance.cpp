// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// when any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "oracles.hpp"
#include "rico/gateway.hpp"
#include "rico/lidar.hpp"
#include "rico/scenarios.hpp"
#include "ws_client.hpp"

using namespace rico;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RuntimeConfig fixture(const std::string& name) { return load_config(std::string(RICO_TEST_DATA "/") + name + ".yaml"); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
  std::fflush(stdout);
}

// ---- criteria -----------------------------------------------------------------

Verdict comprehension() {
  const RuntimeConfig cfg = load_config(RICO_SOURCE_DIR "/configs/room.yaml");
  const std::uint64_t seeds[] = {1, 2, 3, 4, 5};
  std::vector<double> rates;
  double slowest = 0.0;
  for (std::uint64_t s : seeds) {
    const auto t0 = Clock::now();
    rates.push_back(run_comprehension_benchmark(cfg, s, 1000).success_rate);
    slowest = std::max(slowest, seconds_since(t0));
  }
  double mean = 0.0;
  for (double r : rates) mean += r / rates.size();
  const double lo = *std::min_element(rates.begin(), rates.end());
  const double hi = *std::max_element(rates.begin(), rates.end());
  const double spread = std::max(hi - mean, mean - lo);
  std::ostringstream d;
  d << "rates";
  for (double r : rates) d << ' ' << r;
  d << "; min " << lo << " (>= 0.90), deviation from mean " << spread << " (<= 0.02), slowest 1000-trial run "
    << slowest << " s (< 30)";
  return {lo >= 0.90 && spread <= 0.02 && slowest < 30.0, d.str()};
}

Verdict patrol_hazard() {
  const RuntimeConfig cfg = fixture("patrol_hot");
  const auto t0 = Clock::now();
  const ScenarioRun a = run_scenario(cfg, "patrol", 42);
  const double took = seconds_since(t0);
  const ScenarioRun b = run_scenario(cfg, "patrol", 42);
  const bool one = a.hazards.size() == 1;
  const bool near = one && a.hazards[0].reported_at_base && a.hazards[0].distance_to_base <= 0.5;
  const bool in_time = one && a.hazards[0].reported_at <= 300.0;
  const bool same = a.events == b.events && a.trace == b.trace && metrics_json(a) == metrics_json(b);
  std::ostringstream d;
  d << a.hazards.size() << " report(s)";
  if (one)
    d << ", " << a.hazards[0].distance_to_base << " m from base at t=" << a.hazards[0].reported_at << " s";
  d << ", deterministic " << (same ? "yes" : "no") << ", wall " << took << " s (< 5)";
  return {one && near && in_time && same && took < 5.0, d.str()};
}

Verdict transport() {
  const std::pair<const char*, std::pair<std::string, std::vector<std::string>>> cases[] = {
      {"transport_ok", {"success", {}}},
      {"transport_edge", {"anomaly", {"edge_violation"}}},
      {"transport_light", {"anomaly", {"weight_mismatch"}}}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& [name, want] : cases) {
    const ScenarioRun r = run_scenario(fixture(name), "transport", 42);
    const bool match = r.outcome == want.first && r.reasons == want.second;
    ok &= match;
    d << name << '=' << r.outcome << '{';
    for (std::size_t i = 0; i < r.reasons.size(); ++i) d << (i ? "," : "") << r.reasons[i];
    d << "} ";
  }
  return {ok, d.str()};
}

Verdict tasker_properties() {
  std::mt19937_64 rng(20240);
  int violations = 0;
  std::string first;
  for (int k = 0; k < 1000; ++k) {
    const auto ops = oracle::random_ops(rng, 80);
    if (auto why = oracle::replay_mismatch(ops)) {
      if (!violations) first = "sequence " + std::to_string(k) + ": " + *why;
      ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in 1000 sequences" + (first.empty() ? "" : "; " + first)};
}

Verdict fall_preemption() {
  const ScenarioRun run = run_scenario(fixture("patrol_fall"), "fall", 42);
  TaskId patrol{}, fall{};
  for (const auto& o : run.outcomes) {
    if (o.task_name == "patrol") patrol = o.task;
    if (o.task_name == "fall_response") fall = o.task;
  }
  std::vector<TraceRecord> pt, ft;
  for (const auto& r : run.trace) {
    if (r.id == patrol) pt.push_back(r);
    if (r.id == fall) ft.push_back(r);
  }
  const std::vector<TaskState> want = {TaskState::Waiting, TaskState::Executing, TaskState::Suspended,
                                       TaskState::Executing, TaskState::Finished};
  std::vector<TaskState> got;
  for (const auto& r : pt) got.push_back(r.after);
  const bool sequence = got == want;
  // The fall task starts in the same harmonise call that suspends patrol.
  const bool same_cycle = sequence && ft.size() >= 2 && ft[1].op == "start" && ft[1].tick == pt[2].tick;
  double fell_at = -1, started_at = -2;
  int laps = 0;
  for (const auto& e : run.events) {
    if (e.kind == "world_event" && e.payload.value("event", "") == "person_fall") fell_at = e.time;
    if (e.kind == "task_started" && e.payload.value("name", "") == "fall_response") started_at = e.time;
    laps += e.kind == "patrol_lap";
  }
  const bool immediate = std::abs(fell_at - started_at) < 1e-9;
  const bool laps_ok = laps == 2 && run.outcome == "success";
  std::ostringstream d;
  d << "patrol states";
  for (TaskState s : got) d << ' ' << to_string(s);
  d << "; fall started in the suspending harmonise " << (same_cycle ? "yes" : "no") << ", at fall time "
    << (immediate ? "yes" : "no") << "; laps " << laps << "/2";
  return {sequence && same_cycle && immediate && laps_ok, d.str()};
}

Verdict sensor_oracles() {
  int tactile_bad = 0, hotspot_bad = 0, lidar_bad = 0;
  double tactile_err = 0.0, lidar_err = 0.0;
  {
    std::mt19937_64 rng(501);
    for (int k = 0; k < 500; ++k) {
      const PressureGrid g = gen::pressure_grid(rng);
      const TableReading r = analyze_table(g);
      const oracle::TableSums s = oracle::table_sums(g, 0.01);
      if (r.present != (s.total > 0.05)) {
        ++tactile_bad;
        continue;
      }
      if (!r.present) continue;
      const double e = std::max({std::abs(r.weight - s.weight), std::abs(r.centroid_row - s.centroid_row),
                                 std::abs(r.centroid_col - s.centroid_col)});
      tactile_err = std::max(tactile_err, e);
      tactile_bad += e > 1e-9 || r.edge_flag != s.edge;
    }
  }
  {
    std::mt19937_64 rng(201);
    for (int k = 0; k < 200; ++k) {
      const ThermalFrame f = gen::thermal_frame(rng, 45.0);
      const auto got = detect_hotspots(f, 45.0);
      const auto want = oracle::label_components(f.pixels, f.rows, f.cols, 45.0);
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i)
        same = got[i].area == want[i].area && got[i].centroid_row == want[i].centroid_row &&
               got[i].centroid_col == want[i].centroid_col && got[i].peak_temperature == want[i].peak;
      hotspot_bad += !same;
    }
  }
  {
    std::mt19937_64 rng(101);
    for (int k = 0; k < 100; ++k) {
      const WorldState w = gen::lidar_world(rng);
      const LidarScan s = lidar_scan(w);
      double worst = 0.0;
      for (int i = 0; i < 360; ++i)
        worst = std::max(worst, std::abs(s.ranges[i] - oracle::beam_range(w, w.robot.theta + i * (2 * std::numbers::pi / 360),
                                                                          10.0, 0.2)));
      lidar_err = std::max(lidar_err, worst);
      lidar_bad += !(worst <= 1e-9);
    }
  }
  std::ostringstream d;
  d << "tactile " << 500 - tactile_bad << "/500 (max err " << tactile_err << "), hotspots " << 200 - hotspot_bad
    << "/200 exact, lidar " << 100 - lidar_bad << "/100 (max err " << lidar_err << ")";
  return {tactile_bad == 0 && hotspot_bad == 0 && lidar_bad == 0, d.str()};
}

RuntimeConfig gateway_room() {
  RuntimeConfig c = fixture("patrol_fall");
  c.events.clear();
  c.telemetry_rate_hz = 10.0;
  return c;
}

Verdict gateway_fuzz() {
  constexpr int kMessages = 100000;
  // In process: parse every message and apply the valid ones to a live runtime.
  std::mt19937_64 rng(31337);
  Runtime rt(gateway_room());
  int valid = 0, escaped = 0;
  for (int i = 0; i < kMessages; ++i) {
    const std::string msg = gen::fuzz_message(rng);
    try {
      const auto r = parse_command(msg);
      if (const Command* c = std::get_if<Command>(&r)) {
        ++valid;
        apply_command(rt, *c);
      }
      if (i % 200 == 0) rt.tick();
    } catch (...) {
      ++escaped;
    }
  }

  // Over the wire: the same volume through a live gateway on one
  // connection, then a probe that must still be answered. Text frames must
  // be UTF-8, so byte strings that are not go out as binary frames.
  WorldLoop loop(gateway_room(), LoopOptions{true, 0.0});
  Gateway gw(loop, "127.0.0.1", 0);
  loop.start();
  std::thread server([&] { gw.run(); });
  bool answered = false;
  int binary = 0, closed_ok = 0;
  std::string wire_error;
  try {
    {
      wsclient::Client client(gw.port());
      std::mt19937_64 wire(4242);
      for (int i = 0; i < kMessages; ++i) {
        const std::string msg = gen::fuzz_message(wire);
        if (gen::valid_utf8(msg)) {
          client.send_text(msg);
        } else {
          client.send_binary(msg);
          ++binary;
        }
      }
      client.send({{"type", "speak"}, {"person", "probe-after-fuzz"}, {"text", "hi"}});
      answered = client
                     .read_until(
                         [](const nlohmann::json& j) {
                           return j.at("type") == "error" &&
                                  j.at("reason").get<std::string>().find("probe-after-fuzz") != std::string::npos;
                         },
                         100000)
                     .has_value();
    }
    // A text frame with invalid UTF-8 is a protocol violation: that
    // connection is closed, the server keeps serving everyone else.
    for (int i = 0; i < 20; ++i) {
      wsclient::Client bad(gw.port());
      bad.send_text(std::string("{\"type\":\"\xff\xfe\"}"));
      try {
        for (int k = 0; k < 1000; ++k) bad.read_text();
      } catch (const boost::system::system_error& e) {
        closed_ok += e.code() == boost::beast::websocket::error::closed;
      }
    }
    wsclient::Client fresh(gw.port());
    answered = answered && fresh.read().at("type") == "hello";
  } catch (const std::exception& e) {
    wire_error = e.what();
  }
  gw.stop();
  server.join();
  loop.stop();
  loop.join();

  std::ostringstream d;
  d << kMessages << " in-process (" << valid << " valid), " << escaped << " escaped exceptions; " << kMessages
    << " over one WebSocket (" << binary << " as binary frames), connection alive afterwards "
    << (answered ? "yes" : "no") << "; invalid UTF-8 text frames closed " << closed_ok << "/20 connections cleanly";
  if (!wire_error.empty()) d << " (" << wire_error << ")";
  return {escaped == 0 && answered && closed_ok == 20, d.str()};
}

Verdict frame_round_trip() {
  std::mt19937_64 rng(1000);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const TelemetryFrame f = gen::telemetry_frame(rng);
    bad += !(decode_frame(encode(f)) == f);
  }
  return {bad == 0, std::to_string(1000 - bad) + "/1000 frames decode to an identical frame"};
}

Verdict headless_determinism() {
  const std::pair<const char*, const char*> runs[] = {
      {"patrol_hot", "patrol"}, {"patrol_fall", "fall"}, {"transport_ok", "transport"}, {"transport_edge", "transport"}};
  std::ostringstream d;
  bool ok = true;
  for (const auto& [file, scenario] : runs) {
    const RuntimeConfig cfg = fixture(file);
    const bool same = metrics_json(run_scenario(cfg, scenario, 7)).dump() == metrics_json(run_scenario(cfg, scenario, 7)).dump();
    ok &= same;
    d << file << ':' << (same ? "identical" : "DIFFERENT") << ' ';
  }
  const RuntimeConfig room = load_config(RICO_SOURCE_DIR "/configs/room.yaml");
  const bool comp = metrics_json(run_scenario(room, "comprehension", 11, 0.0, 200)).dump() ==
                    metrics_json(run_scenario(room, "comprehension", 11, 0.0, 200)).dump();
  ok &= comp;
  d << "comprehension:" << (comp ? "identical" : "DIFFERENT");
  return {ok, d.str()};
}

}  // namespace

int main() {
  report("comprehension_rate", comprehension);
  report("patrol_hazard_end_to_end", patrol_hazard);
  report("transport_verification", transport);
  report("tasker_properties", tasker_properties);
  report("fall_preemption", fall_preemption);
  report("sensor_oracle_equivalence", sensor_oracles);
  report("gateway_fuzz", gateway_fuzz);
  report("telemetry_round_trip", frame_round_trip);
  report("headless_determinism", headless_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
