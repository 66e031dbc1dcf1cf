#include "proofloop/core/trace_event.hpp"

#include <chrono>

#include "proofloop/core/digest.hpp"

namespace proofloop {

bool TraceEvent::same_content(const TraceEvent& other) const {
  return run == other.run && phase == other.phase && kind == other.kind && lane == other.lane &&
         digest == other.digest;
}

TraceEvent make_event(int phase, std::string kind, std::string lane, nlohmann::json data) {
  TraceEvent e;
  e.phase = phase;
  e.kind = std::move(kind);
  e.lane = std::move(lane);
  e.data = std::move(data);
  e.digest = short_digest(e.data.dump());
  e.ts_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
  return e;
}

void EventBuffer::add(int phase, std::string kind, std::string lane, nlohmann::json data) {
  events_.push_back(make_event(phase, std::move(kind), std::move(lane), std::move(data)));
}

void EventBuffer::append(std::vector<TraceEvent> events) {
  events_.insert(events_.end(), std::make_move_iterator(events.begin()),
                 std::make_move_iterator(events.end()));
}

}  // namespace proofloop
