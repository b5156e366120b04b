#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "rico/config.hpp"
#include "rico/protocol.hpp"
#include "rico/runtime.hpp"

namespace rico {

struct LoopOptions {
  bool realtime = true;   // pace ticks to the wall clock; otherwise run flat out
  double duration = 0.0;  // sim seconds; 0 runs until stop()
};

/// Owns the Runtime on a dedicated thread. Commands arrive through an ordered
/// queue; telemetry leaves as immutable encoded frames at the configured sim
/// rate.
class WorldLoop {
 public:
  using Publisher = std::function<void(std::shared_ptr<const std::string>)>;
  using Reply = std::function<void(const std::string& reason)>;

  WorldLoop(RuntimeConfig cfg, LoopOptions options);
  ~WorldLoop();
  WorldLoop(const WorldLoop&) = delete;
  WorldLoop& operator=(const WorldLoop&) = delete;

  /// Called from the loop thread for every frame. Set before start().
  void set_publisher(Publisher publisher);
  /// Called from the loop thread once the loop ends on its own.
  void set_on_finish(std::function<void()> on_finish);

  /// Queues a command; `on_error` runs on the loop thread if the world
  /// rejects it.
  void post(Command command, Reply on_error = {});

  void start();
  void stop();
  void join();
  bool running() const { return running_.load(); }

  /// Latest published frame, or null before the first one.
  std::shared_ptr<const std::string> latest() const;
  const std::string& hello() const { return hello_; }
  std::uint64_t frames() const { return seq_.load(); }

  /// Direct access; only valid before start() or after join().
  Runtime& runtime() { return runtime_; }

  /// Drives one tick on the calling thread (only while not started).
  void step_once();

 private:
  void run();
  void drain();
  void publish();

  struct Pending {
    Command command;
    Reply on_error;
  };

  Runtime runtime_;
  LoopOptions options_;
  std::string hello_;
  Publisher publisher_;
  std::function<void()> on_finish_;

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::deque<Pending> queue_;
  std::shared_ptr<const std::string> latest_;

  std::thread thread_;
  std::atomic<bool> running_{false};
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> seq_{0};
  double next_publish_ = 0.0;
};

}  // namespace rico
