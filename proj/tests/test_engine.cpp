#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "ivnsim/engine.hpp"

using namespace ivnsim;

TEST_CASE("event at the current instant dispatches first") {
  Engine eng;
  std::vector<int> order;
  eng.schedule(SimTime{0}, [&] { order.push_back(1); });
  eng.schedule(microseconds(1), [&] { order.push_back(2); });
  eng.run_until(milliseconds(1));
  CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("equal fire times dispatch in schedule order") {
  Engine eng;
  std::vector<int> order;
  eng.schedule(milliseconds(5), [&] { order.push_back(7); });
  eng.schedule(milliseconds(5), [&] { order.push_back(8); });
  eng.run_until(milliseconds(5));
  CHECK(order == std::vector<int>{7, 8});
}

TEST_CASE("scheduling into the past is a logic bug") {
  Engine eng;
  eng.run_until(milliseconds(2));
  CHECK_THROWS_AS(eng.schedule(milliseconds(1), [] {}), std::logic_error);
}

TEST_CASE("run_until on an empty queue just advances the clock") {
  Engine eng;
  CHECK(eng.run_until(seconds(60)) == 0);
  CHECK(eng.now() == seconds(60));
}

TEST_CASE("a 50ms self-rescheduling tick dispatches 1200 times in 60s") {
  // Oracle: count the grid points k*50ms that are strictly below 60s.
  std::uint64_t expected = 0;
  for (SimTime t{0}; t < seconds(60); t += milliseconds(50)) ++expected;
  CHECK(expected == 1200);

  Engine eng;
  std::uint64_t ticks = 0;
  std::function<void()> tick = [&] {
    ++ticks;
    const SimTime next = eng.now() + milliseconds(50);
    if (next < seconds(60)) eng.schedule(next, tick);
  };
  eng.schedule(SimTime{0}, tick);
  const auto dispatched = eng.run_until(seconds(60));
  CHECK(ticks == expected);
  CHECK(dispatched == expected);
}

TEST_CASE("an event exactly at t_end is dispatched (inclusive boundary)") {
  Engine eng;
  bool fired = false;
  eng.schedule(seconds(60), [&] { fired = true; });
  eng.run_until(seconds(60));
  CHECK(fired);
}

TEST_CASE("now() is visible inside handlers and never decreases") {
  Engine eng;
  CHECK(eng.now() == SimTime{0});
  std::vector<SimTime> seen;
  for (int i = 0; i < 50; ++i) {
    eng.schedule(microseconds(i * 37 % 100), [&] { seen.push_back(eng.now()); });
  }
  eng.schedule(milliseconds(5), [&] { CHECK(eng.now() == milliseconds(5)); });
  eng.run_until(seconds(30));
  CHECK(eng.now() == seconds(30));
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1] <= seen[i]);
}

TEST_CASE("canceled events are skipped and accounted") {
  Engine eng;
  int fired = 0;
  auto h1 = eng.schedule(milliseconds(1), [&] { ++fired; });
  eng.schedule(milliseconds(2), [&] { ++fired; });
  eng.cancel(h1);
  eng.cancel(h1);  // idempotent
  eng.run_until(milliseconds(3));
  CHECK(fired == 1);
  CHECK(eng.scheduled_count() == 2);
  CHECK(eng.canceled_count() == 1);
  CHECK(eng.dispatched_count() == eng.scheduled_count() - eng.canceled_count());
}

TEST_CASE("dispatch count equals schedule count minus cancellations at drain") {
  Engine eng;
  std::vector<Engine::EventHandle> handles;
  int fired = 0;
  for (int i = 0; i < 200; ++i) {
    handles.push_back(eng.schedule(microseconds(i), [&] { ++fired; }));
  }
  for (std::size_t i = 0; i < handles.size(); i += 3) eng.cancel(handles[i]);
  eng.run_until(seconds(1));
  CHECK(eng.dispatched_count() == eng.scheduled_count() - eng.canceled_count());
  CHECK(fired == static_cast<int>(eng.dispatched_count()));
}
