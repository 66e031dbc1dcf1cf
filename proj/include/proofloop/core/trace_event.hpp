#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace proofloop {

// One line of the run trace. `digest` covers `data` only, so two traces can
// be compared without looking at wall-clock timestamps.
struct TraceEvent {
  std::uint64_t seq = 0;  // assigned when committed to a run trace
  std::string run;
  int phase = 0;  // 0 when the event is not tied to a phase
  std::string kind;
  std::string lane;
  nlohmann::json data = nlohmann::json::object();
  std::string digest;
  std::int64_t ts_ms = 0;
  // Run-wide tokens left when the event was committed; not part of content.
  std::optional<std::int64_t> budget_remaining;

  // Identity used for replay comparison: everything but seq and ts_ms.
  bool same_content(const TraceEvent& other) const;
};

TraceEvent make_event(int phase, std::string kind, std::string lane, nlohmann::json data);

// Ordered event collector owned by one sequential lane of work (a solve
// branch, one side of a bisection, ...). Buffers are merged in a fixed order
// by their owner, which keeps traces independent of thread scheduling.
class EventBuffer {
 public:
  void add(int phase, std::string kind, std::string lane, nlohmann::json data);
  void append(std::vector<TraceEvent> events);
  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<TraceEvent> take() { return std::exchange(events_, {}); }

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace proofloop
