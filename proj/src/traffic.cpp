#include "ivnsim/traffic.hpp"

#include <memory>
#include <random>

namespace ivnsim {

namespace {

struct GeneratorState {
  FlowSpec spec;
  SimTime end;
  std::mt19937_64 rng;
  std::function<void(CanMessage)> emit;
};

void tick(Engine& engine, const std::shared_ptr<GeneratorState>& st) {
  CanMessage msg;
  msg.can_id = st->spec.can_id;
  msg.dlc = 8;
  msg.payload.resize(8);
  for (auto& b : msg.payload) b = static_cast<std::uint8_t>(st->rng() & 0xff);
  msg.src_ecu = st->spec.src;
  msg.gen_time = engine.now();
  st->emit(std::move(msg));

  const SimTime next = engine.now() + st->spec.period;
  if (next < st->end) {
    engine.schedule(next, [&engine, st]() { tick(engine, st); }, "generator-tick");
  }
}

}  // namespace

void start_periodic_generator(Engine& engine, const FlowSpec& spec, SimTime end,
                              std::uint64_t seed, int flow_index,
                              std::function<void(CanMessage)> emit) {
  if (spec.start >= end) return;
  auto st = std::make_shared<GeneratorState>();
  st->spec = spec;
  st->end = end;
  st->rng.seed(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(flow_index + 1));
  st->emit = std::move(emit);
  engine.schedule(spec.start, [&engine, st]() { tick(engine, st); }, "generator-tick");
}

ArrivalRecord* ArrivalBook::on_receive(int flow, std::uint64_t seq, SimTime t_send,
                                       SimTime t_recv) {
  auto key = std::make_pair(flow, seq);
  auto it = index_.find(key);
  if (it != index_.end()) {
    ++records_[it->second].dup_count;
    ++dup_counts_[static_cast<std::size_t>(flow)];
    ++dup_total_;
    if (first_dup_.ns < 0) first_dup_ = t_recv;
    return nullptr;
  }
  ArrivalRecord r;
  r.flow = flow;
  r.seq = seq;
  r.t_send = t_send;
  r.t_recv = t_recv;
  index_[key] = records_.size();
  records_.push_back(std::move(r));
  return &records_.back();
}

}  // namespace ivnsim
