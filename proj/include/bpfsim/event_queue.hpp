#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bpfsim/sim_time.hpp"

namespace bpfsim {

enum class EventKind : std::uint8_t {
  AppGenerate,
  TxStart,
  TxEnd,
  RxComplete,
  BackoffExpire,
  MobilityTick,
  StatsSample,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::AppGenerate: return "AppGenerate";
    case EventKind::TxStart: return "TxStart";
    case EventKind::TxEnd: return "TxEnd";
    case EventKind::RxComplete: return "RxComplete";
    case EventKind::BackoffExpire: return "BackoffExpire";
    case EventKind::MobilityTick: return "MobilityTick";
    case EventKind::StatsSample: return "StatsSample";
  }
  return "?";
}

// Discriminates the two waiting processes that share the BackoffExpire kind.
enum : std::uint32_t {
  kAuxMacBackoff = 0,
  kAuxProtocolForward = 1,
  kAuxProtocolWindow = 2,
};

struct Event {
  SimTime fire_at = 0;
  EventKind kind = EventKind::StatsSample;
  std::uint32_t node = 0;
  std::uint64_t packet = 0;  // packet key or frame id, kind-dependent
  std::uint32_t aux = 0;
};

struct EventHandle {
  std::uint64_t id = 0;
  explicit operator bool() const { return id != 0; }
};

// Deterministic discrete-event engine. Events with equal fire_at dispatch in
// insertion order; a cancelled event never dispatches; scheduling in the past
// is a logic error that aborts the run.
class Engine {
 public:
  using Handler = std::function<void(const Event&)>;

  void set_handler(Handler h) { handler_ = std::move(h); }

  SimTime now() const { return now_; }

  EventHandle schedule(Event e) {
    if (e.fire_at < now_) {
      throw std::logic_error("Engine::schedule: event in the past");
    }
    const std::uint64_t id = next_id_++;
    live_.emplace(id, e);
    heap_.push(QEntry{e.fire_at, id});
    return EventHandle{id};
  }

  // true iff the event had not yet dispatched and now never will
  bool cancel(EventHandle h) { return live_.erase(h.id) > 0; }

  std::uint64_t run_until(SimTime t_end) {
    std::uint64_t dispatched = 0;
    while (!heap_.empty() && heap_.top().t <= t_end) {
      const QEntry top = heap_.top();
      heap_.pop();
      auto it = live_.find(top.id);
      if (it == live_.end()) continue;  // cancelled
      const Event ev = it->second;
      live_.erase(it);
      now_ = top.t;
      ++dispatched;
      if (handler_) handler_(ev);
    }
    if (t_end > now_) now_ = t_end;
    return dispatched;
  }

  std::size_t pending() const { return live_.size(); }

 private:
  struct QEntry {
    SimTime t;
    std::uint64_t id;
  };
  struct Later {
    bool operator()(const QEntry& a, const QEntry& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.id > b.id;
    }
  };

  std::priority_queue<QEntry, std::vector<QEntry>, Later> heap_;
  std::unordered_map<std::uint64_t, Event> live_;
  Handler handler_;
  SimTime now_ = 0;
  std::uint64_t next_id_ = 1;
};

}  // namespace bpfsim
