#include "rpm/transport/endpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpm/core/errors.hpp"

namespace rpm::transport {

Sender::Sender(EndpointConfig cfg)
    : cfg_(cfg), total_(cfg.size_segments.value_or(std::numeric_limits<std::uint64_t>::max())) {
  if (cfg_.transport == Transport::TcpCubic) throw ConfigError("cubic transport is not implemented");
  if (cfg_.size_segments && *cfg_.size_segments == 0) throw ConfigError("flow size must be >= 1 MSS");
  st_.cwnd = cfg_.initial_cwnd;
  dc_.g = cfg_.dctcp_g;
}

void Sender::start(SimTime now, Outbox& out) {
  send_syn(now, out);
  arm_timer(now);
}

void Sender::send_syn(SimTime now, Outbox& out) {
  Packet syn;
  syn.key = cfg_.key;
  syn.flags = TcpFlags{TcpFlag::Syn};
  syn.size = kHeaderBytes;
  syn.created_at = now;
  syn.flow_id = cfg_.flow_id;
  syn.to_receiver = true;
  out.packets.push_back(syn);
}

void Sender::send_segment(std::uint64_t seg, SimTime now, Outbox& out) {
  Packet p;
  p.key = cfg_.key;
  p.ecn = Ecn::Ect0;
  p.flags = TcpFlags{TcpFlag::Ack};
  // CWR goes on the first new data segment after a reduction.
  if (st_.cwr_pending && seg >= high_) {
    p.flags.set(TcpFlag::Cwr);
    p.signal_at = cwr_cause_;
    cwr_cause_.reset();
    st_.cwr_pending = false;
  }
  p.seq = seg * cfg_.mss;
  p.ack_no = 1;
  p.size = cfg_.mss + kHeaderBytes;
  p.created_at = now;
  p.flow_id = cfg_.flow_id;
  p.to_receiver = true;
  if (seg < high_) ++retransmits_;
  high_ = std::max(high_, seg + 1);
  out.packets.push_back(p);
}

void Sender::on_packet(const Packet& pkt, SimTime now, Outbox& out) {
  if (completed()) return;
  if (pkt.flags.has(TcpFlag::Syn)) {
    on_syn_ack(pkt, now, out);
    return;
  }
  if (!established_ || !pkt.flags.has(TcpFlag::Ack)) return;
  on_ack(pkt, now, out);
}

void Sender::on_syn_ack(const Packet& pkt, SimTime now, Outbox& out) {
  if (established_) return;
  established_ = true;
  update_srtt(st_, now - pkt.echo_ts);
  open_send(now, out);
  dc_.window_end = nxt_ * cfg_.mss;
  arm_timer(now);
}

void Sender::open_send(SimTime now, Outbox& out) {
  const auto window = static_cast<std::uint64_t>(std::max(1.0, std::floor(st_.cwnd)));
  while (nxt_ < total_ && nxt_ - una_ < window) send_segment(nxt_++, now, out);
}

void Sender::begin_reduction_episode(Phase phase) {
  phase_ = phase;
  recover_ = nxt_;
  recover_fs_ = std::max<std::uint64_t>(1, nxt_ - una_);
  prr_delivered_ = 0;
  prr_out_ = 0;
}

void Sender::prr_send(std::uint64_t delivered, SimTime now, Outbox& out) {
  prr_delivered_ += delivered;
  const std::uint64_t flight = nxt_ - una_;
  const std::uint64_t left = phase_ == Phase::Recovery ? std::min<std::uint64_t>(dupacks_, flight) : 0;
  const double pipe = static_cast<double>(flight - left);
  const double ssthresh = st_.ssthresh;
  double sndcnt;
  if (pipe > ssthresh) {
    sndcnt = std::ceil(static_cast<double>(prr_delivered_) * ssthresh / static_cast<double>(recover_fs_)) -
             static_cast<double>(prr_out_);
  } else {
    const double limit = std::max(static_cast<double>(prr_delivered_) - static_cast<double>(prr_out_),
                                  static_cast<double>(delivered)) + 1.0;
    sndcnt = std::min(std::floor(ssthresh - pipe), limit);
  }
  auto budget = static_cast<std::int64_t>(std::max(0.0, sndcnt));
  while (budget-- > 0 && nxt_ < total_) {
    send_segment(nxt_++, now, out);
    ++prr_out_;
  }
}

void Sender::on_ack(const Packet& pkt, SimTime now, Outbox& out) {
  const std::uint64_t ack_seg = pkt.ack_no / cfg_.mss;

  if (ack_seg > una_) {
    const std::uint64_t acked = ack_seg - una_;
    una_ = ack_seg;
    nxt_ = std::max(nxt_, una_);
    dupacks_ = 0;
    update_srtt(st_, now - pkt.echo_ts);

    const Phase before = phase_;
    if (phase_ != Phase::Open && una_ >= recover_) {
      phase_ = Phase::Open;
      st_.cwnd = std::max(1.0, st_.ssthresh);
    }
    const bool in_episode = phase_ != Phase::Open;

    const double cwnd_before = st_.cwnd;
    const auto segs = static_cast<std::uint32_t>(std::min<std::uint64_t>(acked, 0xFFFF'FFFFU));
    WindowAction action;
    if (cfg_.transport == Transport::Dctcp) {
      if (pkt.flags.has(TcpFlag::Ece) && !window_cause_) window_cause_ = pkt.signal_at;
      const auto window_end = dc_.window_end;
      action = dctcp_sender_on_ack(dc_, st_, pkt, now, acked * cfg_.mss, nxt_ * cfg_.mss, segs);
      if (action == WindowAction::Reduce) cwr_cause_ = window_cause_;
      if (dc_.window_end != window_end) window_cause_.reset();
    } else {
      action = in_episode && phase_ == Phase::Recovery ? WindowAction::None
                                                        : tcp_sender_on_ack(st_, pkt, now, segs);
      if (action == WindowAction::Reduce) cwr_cause_ = pkt.signal_at;
    }
    // No growth while a reduction is being paced out.
    if (action == WindowAction::Increase && (in_episode || before != Phase::Open)) st_.cwnd = cwnd_before;

    if (una_ >= total_) {
      completed_at_ = now;
      cancel_timer();
      return;
    }

    if (action == WindowAction::Reduce && phase_ == Phase::Open) {
      begin_reduction_episode(Phase::Cwr);
      prr_send(acked, now, out);
    } else if (phase_ == Phase::Recovery) {
      // Partial ACK: the next hole is retransmitted right away.
      send_segment(una_, now, out);
      ++prr_out_;
      prr_send(acked, now, out);
    } else if (phase_ == Phase::Cwr) {
      prr_send(acked, now, out);
    } else {
      open_send(now, out);
    }
    if (una_ < nxt_) {
      arm_timer(now);
    } else {
      cancel_timer();
    }
    return;
  }

  if (ack_seg == una_ && nxt_ > una_) {
    ++dupacks_;
    if (phase_ != Phase::Recovery && dupacks_ == 3) {
      if (reduction_allowed(st_, now)) {
        loss_recovery(st_, LossEvent::TripleDupAck, now);
        cwr_cause_.reset();
      }
      begin_reduction_episode(Phase::Recovery);
      send_segment(una_, now, out);
      ++prr_out_;
      arm_timer(now);
    } else if (phase_ == Phase::Recovery) {
      prr_send(1, now, out);
    }
  }
}

void Sender::on_timer(SimTime now, Outbox& out) {
  deadline_.reset();
  if (completed()) return;
  ++timeouts_;
  if (!established_) {
    send_syn(now, out);
    arm_timer(now);
    return;
  }
  loss_recovery(st_, LossEvent::Timeout, now);
  cwr_cause_.reset();
  phase_ = Phase::Open;
  dupacks_ = 0;
  nxt_ = una_;
  open_send(now, out);
  arm_timer(now);
}

void Sender::arm_timer(SimTime now) {
  deadline_ = now + retransmission_timeout(st_);
  ++timer_gen_;
}

void Sender::cancel_timer() {
  deadline_.reset();
  ++timer_gen_;
}

Receiver::Receiver(EndpointConfig cfg) : cfg_(cfg) {}

bool Receiver::ece_state() const {
  return cfg_.transport == Transport::Dctcp ? dctcp_.dctcp_ce : tcp_.ece_latch;
}

void Receiver::on_packet(const Packet& pkt, SimTime /*now*/, Outbox& out) {
  if (pkt.flags.has(TcpFlag::Syn)) {
    Packet syn_ack;
    syn_ack.key = pkt.key.swapped();
    syn_ack.flags = TcpFlags{TcpFlag::Syn, TcpFlag::Ack};
    syn_ack.size = kHeaderBytes;
    syn_ack.ack_no = 1;
    syn_ack.echo_ts = pkt.created_at;
    syn_ack.flow_id = pkt.flow_id;
    syn_ack.to_receiver = false;
    out.packets.push_back(syn_ack);
    return;
  }
  if (pkt.payload() == 0) return;

  const std::uint64_t seg = pkt.seq / cfg_.mss;
  if (seg == expected_) {
    ++expected_;
    while (!out_of_order_.empty() && *out_of_order_.begin() == expected_) {
      out_of_order_.erase(out_of_order_.begin());
      ++expected_;
    }
  } else if (seg > expected_) {
    out_of_order_.insert(seg);
  }

  // The echo is attributed to the signal that set the latch.
  if (pkt.flags.has(TcpFlag::Cwr)) latch_cause_.reset();
  if (pkt.ecn == Ecn::Ce && !latch_cause_) latch_cause_ = pkt.signal_at;

  const std::uint64_t ack_no = expected_ * cfg_.mss;
  Packet ack = cfg_.transport == Transport::Dctcp ? dctcp_receiver_on_data(dctcp_, pkt, ack_no)
                                                  : tcp_receiver_on_data(tcp_, pkt, ack_no);
  if (ack.flags.has(TcpFlag::Ece)) ack.signal_at = latch_cause_;
  out.packets.push_back(ack);
}

}  // namespace rpm::transport
