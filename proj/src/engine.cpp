#include "ivnsim/engine.hpp"

#include <stdexcept>
#include <string>

namespace ivnsim {

Engine::EventHandle Engine::schedule(SimTime at, Callback fn, const char* kind) {
  if (at < now_) {
    throw std::logic_error("schedule into the past: fire_at=" + to_string(at) +
                           "ns < now=" + to_string(now_) + "ns (" + kind + ")");
  }
  auto canceled = std::make_shared<bool>(false);
  queue_.push(Item{at, next_seq_++, kind, std::move(fn), canceled});
  ++scheduled_;
  return EventHandle{std::move(canceled)};
}

void Engine::cancel(EventHandle& h) {
  if (h.state_ && !*h.state_) {
    *h.state_ = true;
    ++canceled_;
  }
  h.state_.reset();
}

std::uint64_t Engine::run_until(SimTime t_end) {
  if (t_end < now_) {
    throw std::logic_error("run_until into the past");
  }
  std::uint64_t n = 0;
  while (!queue_.empty() && queue_.top().at <= t_end) {
    Item item = queue_.top();
    queue_.pop();
    if (*item.canceled) continue;
    now_ = item.at;
    ++dispatched_;
    ++n;
    item.fn();
  }
  now_ = t_end;
  return n;
}

}  // namespace ivnsim
