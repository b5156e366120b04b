#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "rico/world_loop.hpp"

namespace rico {

/// WebSocket teleoperation endpoint. Every connection receives a hello
/// message and then every telemetry frame; text messages it sends are
/// validated and queued to the world loop in arrival order. Plain HTTP
/// requests get a JSON status document.
class Gateway {
 public:
  /// Binds immediately; throws std::runtime_error when the address cannot
  /// be bound. Port 0 picks a free port.
  Gateway(WorldLoop& loop, const std::string& address, std::uint16_t port);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  std::uint16_t port() const;
  std::size_t clients() const;

  /// Serves on the calling thread until stop().
  void run();
  /// Safe from any thread.
  void stop();
  /// SIGINT and SIGTERM stop run().
  void stop_on_signals();

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// Splits "host:port"; throws std::invalid_argument on a malformed value.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

}  // namespace rico
