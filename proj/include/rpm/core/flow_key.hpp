#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace rpm {

using IpAddress = std::uint32_t;
using PortNumber = std::uint16_t;

inline constexpr std::uint8_t kProtoTcp = 6;

/// Transport 5-tuple.
struct FlowKey {
  IpAddress src_ip = 0;
  IpAddress dst_ip = 0;
  std::uint8_t proto = kProtoTcp;
  PortNumber src_port = 0;
  PortNumber dst_port = 0;

  /// Exchanges source and destination address and port. swapped().swapped() == *this.
  constexpr FlowKey swapped() const { return FlowKey{dst_ip, src_ip, proto, dst_port, src_port}; }

  friend constexpr auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

}  // namespace rpm

template <>
struct std::hash<rpm::FlowKey> {
  std::size_t operator()(const rpm::FlowKey& k) const noexcept {
    std::uint64_t v = (static_cast<std::uint64_t>(k.src_ip) << 32) | k.dst_ip;
    std::uint64_t w = (static_cast<std::uint64_t>(k.src_port) << 24) | (static_cast<std::uint64_t>(k.dst_port) << 8) | k.proto;
    return std::hash<std::uint64_t>{}(v ^ (w * 0x9E3779B97F4A7C15ULL));
  }
};
