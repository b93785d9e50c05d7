#include "ivnsim/adapter.hpp"

#include <stdexcept>

namespace ivnsim {

AdapterModel::AdapterModel(std::string addr, const TimingConfig& timing,
                           const ReliabilityConfig& rel, Engine* engine, TraceLog* trace)
    : addr_(std::move(addr)), timing_(timing), rel_(rel), engine_(engine), trace_(trace) {}

void AdapterModel::send(const CanMessage& msg, const std::string& dst_addr) {
  if (msg.dlc > kMaxDlc || msg.payload.size() != msg.dlc || msg.can_id >= kMaxCanId) {
    throw std::invalid_argument(addr_ + ": malformed message (can_id=" +
                                std::to_string(msg.can_id) + " dlc=" + std::to_string(msg.dlc) +
                                " payload=" + std::to_string(msg.payload.size()) + ")");
  }

  FrameInFlight f;
  f.frame.src_addr = addr_;
  f.frame.dst_addr = dst_addr;
  f.frame.kind = EthFrame::Kind::Data;
  f.frame.seq = ++next_seq_[dst_addr];
  f.frame.inner = msg;
  f.gen_time = msg.gen_time;

  const SimTime at = engine_->now() + timing_.encap;
  engine_->schedule(at, [this, f = std::move(f)]() mutable {
    f.first_emit = engine_->now();
    f.this_emit = f.first_emit;
    trace_->add(engine_->now(), TraceKind::FrameEmit, addr_, "dst=" + f.frame.dst_addr, -1,
                static_cast<std::int64_t>(f.frame.seq));
    if (reliable_) {
      auto key = std::make_pair(f.frame.dst_addr, f.frame.seq);
      pending_[key] = Pending{f, {}, 1};
      arm_timer(f.frame.dst_addr, f.frame.seq);
    }
    emit_copy(std::move(f));
  }, "encap-done");
}

void AdapterModel::emit_copy(FrameInFlight f) { emit_(std::move(f)); }

void AdapterModel::arm_timer(const std::string& dst, std::uint64_t seq) {
  auto key = std::make_pair(dst, seq);
  auto it = pending_.find(key);
  if (it == pending_.end()) return;
  it->second.timer = engine_->schedule(engine_->now() + rel_.rto,
                                       [this, dst, seq]() { on_timeout(dst, seq); }, "rto");
}

void AdapterModel::on_timeout(const std::string& dst, std::uint64_t seq) {
  auto key = std::make_pair(dst, seq);
  auto it = pending_.find(key);
  if (it == pending_.end()) return;
  Pending& p = it->second;
  if (p.attempts > rel_.max_retries) {
    ++losses_;
    trace_->add(engine_->now(), TraceKind::RetriesExhausted, addr_, "dst=" + dst, -1,
                static_cast<std::int64_t>(seq));
    if (loss_) loss_(dst, seq);
    pending_.erase(it);
    return;
  }
  p.attempts += 1;
  ++retransmissions_;
  FrameInFlight copy = p.frame;
  copy.this_emit = engine_->now();
  copy.attempt = p.attempts;
  trace_->add(engine_->now(), TraceKind::Retransmit, addr_,
              "dst=" + dst + " attempt=" + std::to_string(p.attempts), -1,
              static_cast<std::int64_t>(seq));
  if (retransmit_cb_) retransmit_cb_(dst, seq, p.attempts);
  arm_timer(dst, seq);
  emit_copy(std::move(copy));
}

void AdapterModel::on_frame(FrameInFlight f) {
  if (f.frame.dst_addr != addr_) return;  // flood copy for someone else

  if (f.frame.kind == EthFrame::Kind::Ack) {
    auto key = std::make_pair(f.frame.src_addr, f.frame.seq);
    auto it = pending_.find(key);
    if (it != pending_.end()) {
      engine_->cancel(it->second.timer);
      pending_.erase(it);
      trace_->add(engine_->now(), TraceKind::AckConsumed, addr_, "from=" + f.frame.src_addr, -1,
                  static_cast<std::int64_t>(f.frame.seq));
    }
    return;
  }

  // Corrupted envelope: the payload no longer matches its declared length.
  if (f.frame.inner.payload.size() != f.frame.inner.dlc || f.frame.inner.dlc > kMaxDlc) {
    ++decode_errors_;
    trace_->add(engine_->now(), TraceKind::DecodeError, addr_, "from=" + f.frame.src_addr, -1,
                static_cast<std::int64_t>(f.frame.seq));
    return;
  }

  const SimTime at = engine_->now() + timing_.decap;
  engine_->schedule(at, [this, f = std::move(f)]() mutable {
    trace_->add(engine_->now(), TraceKind::Delivered, addr_, "from=" + f.frame.src_addr, -1,
                static_cast<std::int64_t>(f.frame.seq));
    if (reliable_) {
      // Ack every data frame; duplicates re-ack so a lost ack only costs a
      // benign retransmission.
      FrameInFlight ack;
      ack.frame.src_addr = addr_;
      ack.frame.dst_addr = f.frame.src_addr;
      ack.frame.kind = EthFrame::Kind::Ack;
      ack.frame.seq = f.frame.seq;
      ack.frame.inner.can_id = f.frame.inner.can_id;
      ack.gen_time = engine_->now();
      engine_->schedule(engine_->now() + timing_.encap, [this, ack = std::move(ack)]() mutable {
        ack.first_emit = engine_->now();
        ack.this_emit = ack.first_emit;
        trace_->add(engine_->now(), TraceKind::AckEmit, addr_, "dst=" + ack.frame.dst_addr, -1,
                    static_cast<std::int64_t>(ack.frame.seq));
        emit_copy(std::move(ack));
      }, "ack-encap");
    }
    if (deliver_) deliver_(f.frame.inner, f);
  }, "decap-done");
}

}  // namespace ivnsim
