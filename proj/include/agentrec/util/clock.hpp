#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace agentrec {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Millis = std::chrono::milliseconds;

// ISO-8601 UTC, millisecond precision: 2024-05-01T12:00:00.000Z
std::string format_timestamp(Timestamp t);
// Accepts the format above, with or without the fractional part.
// Throws agentrec::Error(kInvalidArgument).
Timestamp parse_timestamp(std::string_view text);

// Time source used for latencies, backoff sleeps and event timestamps.
// Replay and tests substitute ManualClock so traces are reproducible.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
  virtual void sleep_for(Millis d) = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() override;
  void sleep_for(Millis d) override;
};

// Virtual time. sleep_for advances the clock and records the requested delay.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start = Timestamp{}) : now_(start) {}

  Timestamp now() override;
  void sleep_for(Millis d) override;
  void advance(Millis d);
  std::vector<Millis> sleeps() const;

 private:
  mutable std::mutex mu_;
  Timestamp now_;
  std::vector<Millis> sleeps_;
};

}  // namespace agentrec
