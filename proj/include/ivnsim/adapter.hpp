#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "ivnsim/config.hpp"
#include "ivnsim/engine.hpp"
#include "ivnsim/frame.hpp"
#include "ivnsim/trace.hpp"

namespace ivnsim {

// Universal adapter at an ECU's edge: re-packs in-vehicle messages into
// envelope frames (encapsulation delay on the way out, decapsulation delay on
// the way in) and runs the ack/retransmit reliability layer for data frames.
class AdapterModel {
 public:
  using EmitFn = std::function<void(FrameInFlight)>;
  // (message, delivered copy) handed to the attached ECU at T_r.
  using DeliverFn = std::function<void(const CanMessage&, const FrameInFlight&)>;
  using LossFn = std::function<void(const std::string& dst, std::uint64_t seq)>;
  using RetransmitFn = std::function<void(const std::string& dst, std::uint64_t seq, int attempt)>;

  AdapterModel(std::string addr, const TimingConfig& timing, const ReliabilityConfig& rel,
               Engine* engine, TraceLog* trace);

  const std::string& addr() const { return addr_; }

  void set_emit_fn(EmitFn fn) { emit_ = std::move(fn); }
  void set_deliver_fn(DeliverFn fn) { deliver_ = std::move(fn); }
  void set_loss_fn(LossFn fn) { loss_ = std::move(fn); }
  void set_retransmit_fn(RetransmitFn fn) { retransmit_cb_ = std::move(fn); }

  // Optionally disable acking/retransmission (fire-and-forget transport).
  void set_reliable(bool reliable) { reliable_ = reliable; }

  // Encapsulates and emits the frame `encap` later; assigns the next data
  // sequence number of the (addr
  // -> dst) stream and arms the retransmission timer at emission.
  void send(const CanMessage& msg, const std::string& dst_addr);

  // Frame arrival from the attachment link. Data frames addressed here are
  // decapsulated and delivered `decap` later; acks feed the reliability layer.
  void on_frame(FrameInFlight f);

  std::uint64_t decode_errors() const { return decode_errors_; }
  std::uint64_t retransmissions() const { return retransmissions_; }
  std::uint64_t losses() const { return losses_; }

 private:
  void emit_copy(FrameInFlight f);
  void arm_timer(const std::string& dst, std::uint64_t seq);
  void on_timeout(const std::string& dst, std::uint64_t seq);

  struct Pending {
    FrameInFlight frame;  // stored encoded copy for retransmission
    Engine::EventHandle timer;
    int attempts{1};
  };

  std::string addr_;
  TimingConfig timing_;
  ReliabilityConfig rel_;
  Engine* engine_;
  TraceLog* trace_;
  EmitFn emit_;
  DeliverFn deliver_;
  LossFn loss_;
  RetransmitFn retransmit_cb_;
  bool reliable_ = true;

  std::map<std::string, std::uint64_t> next_seq_;
  std::map<std::pair<std::string, std::uint64_t>, Pending> pending_;
  std::uint64_t decode_errors_ = 0;
  std::uint64_t retransmissions_ = 0;
  std::uint64_t losses_ = 0;
};

}  // namespace ivnsim
