#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "rpm/core/packet.hpp"
#include "rpm/transport/congestion.hpp"

namespace rpm::transport {

struct EndpointConfig {
  FlowKey key;  // sender -> receiver direction
  std::uint32_t flow_id = 0;
  std::uint32_t mss = kDefaultMss;
  std::optional<std::uint64_t> size_segments;  // unset: unbounded
  Transport transport = Transport::TcpAimd;
  double initial_cwnd = 10.0;
  double dctcp_g = 1.0 / 16.0;
};

/// Packets emitted by an endpoint during one callback.
struct Outbox {
  std::vector<Packet> packets;
};

/// Sending side of one flow: handshake, window management, NewReno-style
/// fast retransmit, RTO. Window reductions (ECE or loss) are paced with
/// Proportional Rate Reduction so the CWR-flagged segment leaves on the
/// first ACK after the reduction.
class Sender {
 public:
  explicit Sender(EndpointConfig cfg);

  void start(SimTime now, Outbox& out);
  void on_packet(const Packet& pkt, SimTime now, Outbox& out);
  void on_timer(SimTime now, Outbox& out);

  /// Pending retransmission deadline; the generation changes on every re-arm
  /// or cancel so stale timer events can be discarded.
  std::optional<SimTime> timer_deadline() const { return deadline_; }
  std::uint64_t timer_generation() const { return timer_gen_; }

  bool completed() const { return completed_at_.has_value(); }
  std::optional<SimTime> completed_at() const { return completed_at_; }
  bool established() const { return established_; }

  const TcpSenderState& window() const { return st_; }
  const DctcpState& dctcp() const { return dc_; }
  const EndpointConfig& config() const { return cfg_; }
  std::uint64_t snd_una() const { return una_; }
  std::uint64_t snd_nxt() const { return nxt_; }
  std::uint64_t retransmissions() const { return retransmits_; }
  std::uint64_t timeouts() const { return timeouts_; }

 private:
  enum class Phase { Open, Cwr, Recovery };

  void on_syn_ack(const Packet& pkt, SimTime now, Outbox& out);
  void on_ack(const Packet& pkt, SimTime now, Outbox& out);
  void send_segment(std::uint64_t seg, SimTime now, Outbox& out);
  void send_syn(SimTime now, Outbox& out);
  void open_send(SimTime now, Outbox& out);
  void begin_reduction_episode(Phase phase);
  void prr_send(std::uint64_t delivered, SimTime now, Outbox& out);
  void arm_timer(SimTime now);
  void cancel_timer();

  EndpointConfig cfg_;
  TcpSenderState st_;
  DctcpState dc_;
  std::uint64_t total_;

  bool established_ = false;

  std::uint64_t una_ = 0;
  std::uint64_t nxt_ = 0;
  std::uint64_t high_ = 0;
  std::uint32_t dupacks_ = 0;

  Phase phase_ = Phase::Open;
  std::uint64_t recover_ = 0;
  std::uint64_t recover_fs_ = 1;
  std::uint64_t prr_delivered_ = 0;
  std::uint64_t prr_out_ = 0;

  std::optional<SimTime> deadline_;
  std::uint64_t timer_gen_ = 0;
  std::optional<SimTime> completed_at_;

  std::uint64_t retransmits_ = 0;
  std::uint64_t timeouts_ = 0;

  std::optional<SimTime> cwr_cause_;
  std::optional<SimTime> window_cause_;  // first marked ACK of the DCTCP window
};

/// Receiving side: reassembly, cumulative ACK per data packet, ECN echo.
class Receiver {
 public:
  explicit Receiver(EndpointConfig cfg);

  void on_packet(const Packet& pkt, SimTime now, Outbox& out);

  std::uint64_t bytes_delivered() const { return expected_ * cfg_.mss; }
  bool ece_state() const;

 private:
  EndpointConfig cfg_;
  TcpReceiverState tcp_;
  DctcpReceiverState dctcp_;
  std::uint64_t expected_ = 0;
  std::set<std::uint64_t> out_of_order_;
  std::optional<SimTime> latch_cause_;
};

}  // namespace rpm::transport
