#pragma once

#include <cstdint>
#include <vector>

#include "rpm/core/flow_key.hpp"
#include "rpm/core/packet.hpp"

namespace rpm::dataplane {

/// Array of saturating counters holding pending congestion signals, indexed
/// either by flow hash (per-flow mode) or by egress port (per-port mode).
class CongestionStateRegister {
 public:
  static constexpr std::uint32_t kDefaultSize = 1U << 16;
  static constexpr std::uint32_t kDefaultCounterMax = 255;

  /// size must be a power of two; counter_max must be positive.
  explicit CongestionStateRegister(std::uint32_t size = kDefaultSize,
                                   std::uint32_t counter_max = kDefaultCounterMax);

  std::uint32_t size() const { return static_cast<std::uint32_t>(cells_.size()); }
  std::uint32_t counter_max() const { return counter_max_; }
  std::uint32_t cell(std::uint32_t index) const { return cells_.at(index); }

  /// Saturates at counter_max. Returns false when the increment was absorbed.
  bool increment(std::uint32_t index);
  /// Decrements when the cell is >= 1 and reports whether it did.
  bool try_decrement(std::uint32_t index);

  std::uint64_t total() const;
  std::uint64_t saturated_increments() const { return saturated_; }

 private:
  std::vector<std::uint32_t> cells_;
  std::uint32_t counter_max_;
  std::uint64_t saturated_ = 0;
};

/// Fixed, unsalted 5-tuple hash reduced to [0, register_size).
///
/// The tuple is packed into two 64-bit words (addresses; ports and protocol),
/// combined and passed through the MurmurHash3 64-bit finalizer; the low bits
/// select the cell. register_size must be a power of two.
std::uint32_t flow_hash(const FlowKey& key, std::uint32_t register_size);

/// A congestion signal at the AQM for a packet of flow `key`: bump its cell.
void on_congestion_signal(CongestionStateRegister& reg, const FlowKey& key);

/// Reverse-path marking. Looks up the cell of the packet's swapped tuple; if a
/// signal is pending, sets TCP ECE and consumes it. Packets without the ACK
/// flag pass untouched. Returns true when the packet was marked.
bool mark_reverse(CongestionStateRegister& reg, Packet& pkt);

/// Value form of mark_reverse.
Packet on_reverse_packet(CongestionStateRegister& reg, Packet pkt);

enum class ForwardMarkResult { Marked, AlreadyCe, Dropped };

/// Forward CE marking used by the baseline: ECT becomes CE, CE stays CE,
/// NotECT is dropped.
ForwardMarkResult forward_mark(Packet& pkt);

/// Per-port aggregation: one counter per egress port of the AQM switch.
void per_port_signal(CongestionStateRegister& reg, std::uint32_t egress_port);
/// `egress_port` is the port the packet's forward counterpart leaves through.
bool per_port_mark(CongestionStateRegister& reg, std::uint32_t egress_port, Packet& pkt);

}  // namespace rpm::dataplane
