#include "rpm/transport/congestion.hpp"

#include <algorithm>

namespace rpm::transport {

void apply_reduction(TcpSenderState& st, double factor, SimTime now) {
  st.cwnd = std::max(1.0, factor * st.cwnd);
  st.ssthresh = st.cwnd;
  st.last_reduction = now;
  st.cwr_pending = true;
  ++st.reductions;
}

bool reduction_allowed(const TcpSenderState& st, SimTime now) {
  if (!st.last_reduction) return true;
  const SimTime guard = st.srtt.value_or(SimTime{});
  return now - *st.last_reduction >= guard;
}

void update_srtt(TcpSenderState& st, SimTime sample) {
  if (!st.srtt) {
    st.srtt = sample;
    return;
  }
  // srtt += (sample - srtt) / 8, kept in integer nanoseconds
  const std::int64_t diff = sample.ns() - st.srtt->ns();
  st.srtt = SimTime::from_ns(st.srtt->ns() + diff / 8);
}

namespace {

WindowAction grow(TcpSenderState& st, std::uint32_t acked_segments) {
  if (st.cwnd < st.ssthresh) {
    st.cwnd = std::min(st.cwnd + acked_segments, std::max(st.ssthresh, st.cwnd));
  } else {
    st.cwnd += st.a / st.cwnd;
  }
  return WindowAction::Increase;
}

}  // namespace

WindowAction tcp_sender_on_ack(TcpSenderState& st, const Packet& ack, SimTime now,
                               std::uint32_t acked_segments) {
  if (ack.flags.has(TcpFlag::Ece)) {
    if (!reduction_allowed(st, now)) return WindowAction::None;
    apply_reduction(st, 1.0 - st.b, now);
    return WindowAction::Reduce;
  }
  return grow(st, acked_segments);
}

namespace {

Packet make_ack(const Packet& data, std::uint64_t ack_no, bool ece) {
  Packet ack;
  ack.key = data.key.swapped();
  ack.ecn = Ecn::NotEct;
  ack.flags = TcpFlags{TcpFlag::Ack};
  if (ece) ack.flags.set(TcpFlag::Ece);
  ack.ack_no = ack_no;
  ack.size = kHeaderBytes;
  ack.echo_ts = data.created_at;
  ack.flow_id = data.flow_id;
  ack.to_receiver = !data.to_receiver;
  return ack;
}

}  // namespace

// CWR is applied before CE so that a CE mark on the CWR segment itself is
// still echoed.
Packet tcp_receiver_on_data(TcpReceiverState& st, const Packet& data, std::uint64_t ack_no) {
  if (data.flags.has(TcpFlag::Cwr)) st.ece_latch = false;
  if (data.ecn == Ecn::Ce) st.ece_latch = true;
  return make_ack(data, ack_no, st.ece_latch);
}

Packet dctcp_receiver_on_data(DctcpReceiverState& st, const Packet& data, std::uint64_t ack_no) {
  if (data.flags.has(TcpFlag::Cwr)) st.dctcp_ce = false;
  if (data.ecn == Ecn::Ce) st.dctcp_ce = true;
  return make_ack(data, ack_no, st.dctcp_ce);
}

WindowAction dctcp_sender_on_ack(DctcpState& dc, TcpSenderState& st, const Packet& ack, SimTime now,
                                 std::uint64_t acked_bytes, std::uint64_t snd_nxt,
                                 std::uint32_t acked_segments) {
  dc.bytes_acked += acked_bytes;
  if (ack.flags.has(TcpFlag::Ece)) dc.bytes_marked += acked_bytes;

  if (ack.ack_no >= dc.window_end) {
    const std::uint64_t acked = dc.bytes_acked;
    const std::uint64_t marked = dc.bytes_marked;
    dc.bytes_acked = 0;
    dc.bytes_marked = 0;
    dc.window_end = snd_nxt;
    if (acked > 0) {
      const double f = static_cast<double>(marked) / static_cast<double>(acked);
      dc.alpha = (1.0 - dc.g) * dc.alpha + dc.g * f;
      dc.alpha = std::clamp(dc.alpha, 0.0, 1.0);
      if (f > 0.0 && reduction_allowed(st, now)) {
        apply_reduction(st, 1.0 - dc.alpha / 2.0, now);
        return WindowAction::Reduce;
      }
    }
  }
  return grow(st, acked_segments);
}

WindowAction loss_recovery(TcpSenderState& st, LossEvent ev, SimTime now) {
  switch (ev) {
    case LossEvent::TripleDupAck:
      apply_reduction(st, 0.5, now);
      return WindowAction::Reduce;
    case LossEvent::Timeout:
      st.ssthresh = std::max(st.cwnd / 2.0, 2.0);
      st.cwnd = 1.0;
      st.last_reduction = now;
      st.cwr_pending = true;
      ++st.reductions;
      return WindowAction::Reduce;
  }
  return WindowAction::None;
}

SimTime retransmission_timeout(const TcpSenderState& st) {
  if (!st.srtt) return SimTime::from_ms(1000);
  return std::max(SimTime::from_ms(200), *st.srtt * 4);
}

}  // namespace rpm::transport
