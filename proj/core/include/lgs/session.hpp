#pragma once

// One interactive session as used by `lgsim serve`: a command queue feeding
// one sequential kernel. Transport-agnostic: feed it one JSON line, get back
// the JSON lines to push to the client.

#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "lgs/kernel.hpp"

namespace lgs {

class Session {
 public:
  explicit Session(std::string preset = "stable_ground", SimConfig cfg = {});

  /// Handles one client message; every reply is a complete JSON document.
  /// Never throws for bad input: errors become {type:"error", code, detail}.
  std::vector<std::string> handle(std::string_view line);

  std::string state_message() const;
  const SystemState& state() const { return state_; }
  bool paused() const { return paused_; }

  static constexpr std::uint64_t kBatchLimit = 10'000;

 private:
  enum class Pending : std::uint8_t { HandleUp, HandleDown };

  bool apply_pending();
  bool micro_step();
  void run_batch();
  void reset(const std::string& preset);

  std::string preset_;
  SimConfig cfg_;
  SystemState state_;
  kernel::ChoicePolicy policy_ = kernel::ChoicePolicy::interactive();
  std::deque<Pending> pending_;
  bool paused_ = false;
  std::string last_event_;
};

}  // namespace lgs
