#include "rpm/dataplane/rpm.hpp"

#include <bit>
#include <numeric>

#include "rpm/core/errors.hpp"

namespace rpm::dataplane {

CongestionStateRegister::CongestionStateRegister(std::uint32_t size, std::uint32_t counter_max)
    : counter_max_(counter_max) {
  if (size == 0 || !std::has_single_bit(size)) throw ConfigError("register_size must be a power of two");
  if (counter_max == 0) throw ConfigError("counter_max must be positive");
  cells_.assign(size, 0);
}

bool CongestionStateRegister::increment(std::uint32_t index) {
  auto& c = cells_.at(index);
  if (c >= counter_max_) {
    ++saturated_;
    return false;
  }
  ++c;
  return true;
}

bool CongestionStateRegister::try_decrement(std::uint32_t index) {
  auto& c = cells_.at(index);
  if (c == 0) return false;
  --c;
  return true;
}

std::uint64_t CongestionStateRegister::total() const {
  return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0});
}

namespace {

constexpr std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

}  // namespace

std::uint32_t flow_hash(const FlowKey& key, std::uint32_t register_size) {
  if (register_size == 0 || !std::has_single_bit(register_size)) {
    throw ContractViolation("flow_hash: register_size must be a power of two");
  }
  const std::uint64_t addrs = (static_cast<std::uint64_t>(key.src_ip) << 32) | key.dst_ip;
  const std::uint64_t rest = (static_cast<std::uint64_t>(key.src_port) << 32) |
                             (static_cast<std::uint64_t>(key.dst_port) << 16) | key.proto;
  const std::uint64_t h = fmix64(addrs ^ fmix64(rest + 0x9e3779b97f4a7c15ULL));
  return static_cast<std::uint32_t>(h & (register_size - 1));
}

void on_congestion_signal(CongestionStateRegister& reg, const FlowKey& key) {
  reg.increment(flow_hash(key, reg.size()));
}

bool mark_reverse(CongestionStateRegister& reg, Packet& pkt) {
  if (!pkt.is_ack_flagged()) return false;
  const auto pos = flow_hash(pkt.key.swapped(), reg.size());
  if (!reg.try_decrement(pos)) return false;
  pkt.flags.set(TcpFlag::Ece);
  return true;
}

Packet on_reverse_packet(CongestionStateRegister& reg, Packet pkt) {
  mark_reverse(reg, pkt);
  return pkt;
}

ForwardMarkResult forward_mark(Packet& pkt) {
  if (pkt.ecn == Ecn::Ce) return ForwardMarkResult::AlreadyCe;
  if (is_ect(pkt.ecn)) {
    pkt.ecn = Ecn::Ce;
    return ForwardMarkResult::Marked;
  }
  return ForwardMarkResult::Dropped;
}

void per_port_signal(CongestionStateRegister& reg, std::uint32_t egress_port) { reg.increment(egress_port); }

bool per_port_mark(CongestionStateRegister& reg, std::uint32_t egress_port, Packet& pkt) {
  if (!pkt.is_ack_flagged()) return false;
  if (!reg.try_decrement(egress_port)) return false;
  pkt.flags.set(TcpFlag::Ece);
  return true;
}

}  // namespace rpm::dataplane
