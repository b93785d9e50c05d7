#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <vector>

#include "ivnsim/time.hpp"

namespace ivnsim {

// Deterministic single-threaded discrete-event engine. Events with equal
// fire time dispatch in schedule order (monotone sequence tie-break), so a
// run is a pure function of its inputs.
class Engine {
 public:
  using Callback = std::function<void()>;

  class EventHandle {
   public:
    EventHandle() = default;
    bool valid() const { return static_cast<bool>(state_); }

   private:
    friend class Engine;
    explicit EventHandle(std::shared_ptr<bool> state) : state_(std::move(state)) {}
    std::shared_ptr<bool> state_;  // true once canceled
  };

  // Enqueues a callback at `at`. Scheduling into the past is a logic bug.
  EventHandle schedule(SimTime at, Callback fn, const char* kind = "event");

  // Cancels a pending event; canceling twice or after dispatch is a no-op.
  void cancel(EventHandle& h);

  // Dispatches every event with fire_at <= t_end (inclusive) in order,
  // then advances the clock to t_end. Returns the number dispatched.
  std::uint64_t run_until(SimTime t_end);

  SimTime now() const { return now_; }

  std::uint64_t scheduled_count() const { return scheduled_; }
  std::uint64_t dispatched_count() const { return dispatched_; }
  std::uint64_t canceled_count() const { return canceled_; }

 private:
  struct Item {
    SimTime at;
    std::uint64_t seq;
    const char* kind;
    Callback fn;
    std::shared_ptr<bool> canceled;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Item, std::vector<Item>, Later> queue_;
  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
  std::uint64_t scheduled_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t canceled_ = 0;
};

}  // namespace ivnsim
