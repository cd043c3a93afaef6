#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "lgs/state.hpp"

namespace lgsim {

struct ServeOptions {
  std::uint16_t port = 7878;
  std::string preset = "stable_ground";
  lgs::SimConfig config;
  bool loopback_only = true;
};

/// Line-delimited JSON over TCP, one thread and one Session per connection.
/// Returns when `stop` becomes true (checked between accepts) or on a fatal
/// socket error. Writes the bound port to `bound_port` once listening.
int serve(const ServeOptions& opts, std::atomic<bool>& stop,
          std::atomic<std::uint16_t>* bound_port = nullptr);

}  // namespace lgsim
