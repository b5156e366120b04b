#include "rico/world_loop.hpp"

#include <chrono>

namespace rico {

WorldLoop::WorldLoop(RuntimeConfig cfg, LoopOptions options)
    : runtime_(std::move(cfg)), options_(options), hello_(hello_message(runtime_)) {}

WorldLoop::~WorldLoop() {
  stop();
  join();
}

void WorldLoop::set_publisher(Publisher publisher) { publisher_ = std::move(publisher); }
void WorldLoop::set_on_finish(std::function<void()> on_finish) { on_finish_ = std::move(on_finish); }

void WorldLoop::post(Command command, Reply on_error) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back({std::move(command), std::move(on_error)});
  }
  wake_.notify_one();
}

void WorldLoop::start() {
  if (running_.exchange(true)) return;
  stop_ = false;
  thread_ = std::thread([this] { run(); });
}

void WorldLoop::stop() {
  stop_ = true;
  wake_.notify_all();
}

void WorldLoop::join() {
  if (thread_.joinable()) thread_.join();
}

std::shared_ptr<const std::string> WorldLoop::latest() const {
  std::lock_guard lock(mutex_);
  return latest_;
}

void WorldLoop::drain() {
  std::deque<Pending> batch;
  {
    std::lock_guard lock(mutex_);
    batch.swap(queue_);
  }
  for (Pending& p : batch) {
    if (auto err = apply_command(runtime_, p.command)) {
      runtime_.emit("command_error", {{"command", command_type(p.command)}, {"reason", *err}});
      if (p.on_error) p.on_error(*err);
    }
  }
}

void WorldLoop::publish() {
  const double period = 1.0 / runtime_.config().telemetry_rate_hz;
  if (runtime_.time() + 1e-9 < next_publish_) return;
  next_publish_ += period;
  if (next_publish_ <= runtime_.time()) next_publish_ = runtime_.time() + period;
  auto msg = std::make_shared<const std::string>(encode(make_frame(runtime_, seq_.fetch_add(1) + 1)));
  {
    std::lock_guard lock(mutex_);
    latest_ = msg;
  }
  if (publisher_) publisher_(std::move(msg));
}

void WorldLoop::step_once() {
  drain();
  runtime_.tick();
  publish();
}

void WorldLoop::run() {
  using clock = std::chrono::steady_clock;
  const auto dt = std::chrono::duration<double>(runtime_.config().dt);
  const auto t0 = clock::now();
  const double sim0 = runtime_.time();
  std::uint64_t ticks = 0;
  while (!stop_) {
    if (options_.duration > 0.0 && runtime_.time() - sim0 >= options_.duration - 1e-9) break;
    step_once();
    ++ticks;
    if (options_.realtime) {
      std::unique_lock lock(mutex_);
      const auto due = t0 + std::chrono::duration_cast<clock::duration>(dt * static_cast<double>(ticks));
      // Wake early only to stop; queued commands wait for the next tick.
      wake_.wait_until(lock, due, [this] { return stop_.load(); });
    }
  }
  running_ = false;
  if (!stop_ && on_finish_) on_finish_();
}

}  // namespace rico
