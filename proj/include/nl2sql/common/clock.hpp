#pragma once

#include <chrono>
#include <cstdint>

namespace nl2sql {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
};

class SteadyClock final : public Clock {
 public:
  std::int64_t now_ms() const override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
};

/// Always reports the same instant, so measured durations are zero. Used for
/// byte-reproducible artifacts.
class FrozenClock final : public Clock {
 public:
  std::int64_t now_ms() const override { return 0; }
};

}  // namespace nl2sql
