#pragma once

#include <cstdint>
#include <optional>

#include "rpm/core/packet.hpp"
#include "rpm/core/sim_time.hpp"

namespace rpm::transport {

enum class Transport { TcpAimd, TcpCubic, Dctcp };

enum class WindowAction { None, Increase, Reduce };

/// ECN-capable AIMD window state, in MSS units.
struct TcpSenderState {
  double cwnd = 10.0;
  double ssthresh = 1e18;
  std::optional<SimTime> srtt;
  std::optional<SimTime> last_reduction;
  bool cwr_pending = false;
  double a = 1.0;  // additive increase per window
  double b = 0.5;  // multiplicative decrease factor

  std::uint64_t reductions = 0;
};

/// TCP receiver ECN echo: set by CE, cleared by CWR.
struct TcpReceiverState {
  bool ece_latch = false;
};

/// DCTCP sender-side estimator. The observation window closes when the
/// cumulative ACK passes window_end (bytes).
struct DctcpState {
  double alpha = 0.0;
  double g = 1.0 / 16.0;
  std::uint64_t bytes_acked = 0;
  std::uint64_t bytes_marked = 0;
  std::uint64_t window_end = 0;
};

/// DCTCP receiver single-bit state (DCTCP.CE).
struct DctcpReceiverState {
  bool dctcp_ce = false;
};

/// Applies a multiplicative decrease to (1-b)·cwnd, floored at one MSS, and
/// records it. Does not consult the once-per-RTT guard.
void apply_reduction(TcpSenderState& st, double factor, SimTime now);

/// True when a multiplicative decrease is permitted at `now`.
bool reduction_allowed(const TcpSenderState& st, SimTime now);

/// Folds an RTT sample into srtt (gain 1/8, seeded by the first sample).
void update_srtt(TcpSenderState& st, SimTime sample);

/// Reaction of an AIMD sender to an ACK that acknowledges new data.
///
/// An ECE ACK halves the window at most once per srtt and requests CWR on the
/// next new data packet; an ECE ACK inside the guard leaves the window alone.
/// Unmarked ACKs grow the window: +acked_segments in slow start, +a/cwnd in
/// congestion avoidance.
WindowAction tcp_sender_on_ack(TcpSenderState& st, const Packet& ack, SimTime now,
                               std::uint32_t acked_segments = 1);

/// Builds the cumulative ACK for `data`. ack_no is supplied by the caller's
/// reassembly logic.
Packet tcp_receiver_on_data(TcpReceiverState& st, const Packet& data, std::uint64_t ack_no);

Packet dctcp_receiver_on_data(DctcpReceiverState& st, const Packet& data, std::uint64_t ack_no);

/// DCTCP reaction to an ACK acknowledging `acked_bytes` of new data.
///
/// Accumulates acked/marked bytes; when the cumulative ACK reaches
/// window_end the window closes: F = marked/acked, alpha := (1-g)·alpha + g·F,
/// and if F > 0 the window is scaled by (1 - alpha/2), at most once per srtt
/// (a burst of ACKs can close several short windows back to back). The next
/// window ends at `snd_nxt`. Without a reduction the window grows as in AIMD.
WindowAction dctcp_sender_on_ack(DctcpState& dc, TcpSenderState& st, const Packet& ack, SimTime now,
                                 std::uint64_t acked_bytes, std::uint64_t snd_nxt,
                                 std::uint32_t acked_segments = 1);

enum class LossEvent { TripleDupAck, Timeout };

/// 3 dupacks halve the window; a timeout collapses it to one MSS and
/// restarts slow start.
WindowAction loss_recovery(TcpSenderState& st, LossEvent ev, SimTime now);

/// max(200 ms, 4·srtt); 1 s before the first RTT sample.
SimTime retransmission_timeout(const TcpSenderState& st);

}  // namespace rpm::transport
