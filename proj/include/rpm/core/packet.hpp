#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>

#include "rpm/core/flow_key.hpp"
#include "rpm/core/sim_time.hpp"

namespace rpm {

/// IP ECN codepoint.
enum class Ecn : std::uint8_t { NotEct, Ect0, Ect1, Ce };

constexpr bool is_ect(Ecn e) { return e == Ecn::Ect0 || e == Ecn::Ect1; }

enum class TcpFlag : std::uint8_t {
  Syn = 1U << 0,
  Ack = 1U << 1,
  Fin = 1U << 2,
  Ece = 1U << 3,
  Cwr = 1U << 4,
};

class TcpFlags {
 public:
  constexpr TcpFlags() = default;
  constexpr TcpFlags(std::initializer_list<TcpFlag> flags) {
    for (auto f : flags) set(f);
  }

  constexpr bool has(TcpFlag f) const { return (bits_ & static_cast<std::uint8_t>(f)) != 0; }
  constexpr void set(TcpFlag f) { bits_ |= static_cast<std::uint8_t>(f); }
  constexpr void clear(TcpFlag f) { bits_ &= static_cast<std::uint8_t>(~static_cast<std::uint8_t>(f)); }
  constexpr std::uint8_t bits() const { return bits_; }

  friend constexpr bool operator==(TcpFlags, TcpFlags) = default;

 private:
  std::uint8_t bits_ = 0;
};

/// Combined IPv4 + TCP header size; also the minimum packet size.
inline constexpr std::uint32_t kHeaderBytes = 40;
inline constexpr std::uint32_t kDefaultMss = 1460;

inline constexpr std::uint32_t kNoFlow = 0xFFFF'FFFFU;

struct Packet {
  FlowKey key;
  Ecn ecn = Ecn::NotEct;
  TcpFlags flags;
  std::uint64_t seq = 0;     // bytes
  std::uint64_t ack_no = 0;  // bytes
  std::uint32_t size = kHeaderBytes;
  SimTime enqueue_time;  // per hop
  SimTime created_at;
  SimTime echo_ts;  // sender timestamp echoed by the receiver (RTT sampling)

  // Simulator bookkeeping, not part of the wire format.
  std::uint32_t flow_id = kNoFlow;
  bool to_receiver = true;
  // Time of the AQM signal whose feedback this packet carries (CE, ECE or
  // CWR), used only to attribute sender reactions to signals.
  std::optional<SimTime> signal_at;

  constexpr std::uint32_t payload() const { return size - kHeaderBytes; }
  bool is_ack_flagged() const { return key.proto == kProtoTcp && flags.has(TcpFlag::Ack); }
};

std::string_view to_string(Ecn e);

}  // namespace rpm
