#include <doctest.h>

#include <random>
#include <set>
#include <unordered_set>

#include "../oracles/hash_oracle.hpp"
#include "rpm/core/errors.hpp"
#include "rpm/dataplane/rpm.hpp"

using namespace rpm;
using namespace rpm::dataplane;

namespace {

const FlowKey kFwd{0x0A000001, 0x0A00000B, kProtoTcp, 10001, 5001};

Packet ack_of(const FlowKey& forward) {
  Packet p;
  p.key = forward.swapped();
  p.flags = TcpFlags{TcpFlag::Ack};
  return p;
}

}  // namespace

TEST_CASE("flow hash") {
  CHECK(flow_hash(kFwd, 1U << 16) == flow_hash(kFwd, 1U << 16));
  CHECK(flow_hash(kFwd, 1U << 16) < (1U << 16));
  CHECK(kFwd.swapped().swapped() == kFwd);
  // Direction matters; correspondence comes from swapping before hashing.
  int differ = 0;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const FlowKey k{static_cast<IpAddress>(rng()), static_cast<IpAddress>(rng()), kProtoTcp,
                    static_cast<PortNumber>(rng()), static_cast<PortNumber>(rng())};
    differ += flow_hash(k, 1U << 16) != flow_hash(k.swapped(), 1U << 16);
  }
  CHECK(differ > 95);
}

TEST_CASE("collision count sits inside the birthday bound") {
  std::mt19937_64 rng(11);
  std::set<FlowKey> keys;
  while (keys.size() < 10'000) {
    keys.insert(FlowKey{static_cast<IpAddress>(rng()), static_cast<IpAddress>(rng()), kProtoTcp,
                        static_cast<PortNumber>(rng()), static_cast<PortNumber>(rng())});
  }
  std::unordered_set<std::uint32_t> cells;
  std::size_t collisions = 0;
  for (const auto& k : keys) collisions += !cells.insert(flow_hash(k, 1U << 16)).second;
  const auto bound = oracle::birthday_collisions(10'000, 65'536);
  CHECK(std::abs(static_cast<double>(collisions) - bound.mean) <= 3 * bound.sigma);
}

TEST_CASE("register") {
  CHECK_THROWS_AS(CongestionStateRegister(1000), ConfigError);
  CHECK_THROWS_AS(CongestionStateRegister(16, 0), ConfigError);

  CongestionStateRegister reg(16, 3);
  on_congestion_signal(reg, kFwd);
  CHECK(reg.cell(flow_hash(kFwd, 16)) == 1);
  on_congestion_signal(reg, kFwd);
  on_congestion_signal(reg, kFwd);
  on_congestion_signal(reg, kFwd);
  CHECK(reg.cell(flow_hash(kFwd, 16)) == 3);
  CHECK(reg.saturated_increments() == 1);
}

TEST_CASE("three signals then three reverse ACKs") {
  CongestionStateRegister reg;
  for (int i = 0; i < 3; ++i) on_congestion_signal(reg, kFwd);
  int marked = 0;
  for (int i = 0; i < 3; ++i) marked += on_reverse_packet(reg, ack_of(kFwd)).flags.has(TcpFlag::Ece);
  CHECK(marked == 3);
  CHECK(reg.cell(flow_hash(kFwd, reg.size())) == 0);
  CHECK_FALSE(on_reverse_packet(reg, ack_of(kFwd)).flags.has(TcpFlag::Ece));
}

TEST_CASE("reverse marking") {
  CongestionStateRegister reg;
  const auto idx = flow_hash(kFwd, reg.size());

  const auto untouched = on_reverse_packet(reg, ack_of(kFwd));
  CHECK(untouched.flags == TcpFlags{TcpFlag::Ack});

  on_congestion_signal(reg, kFwd);
  on_congestion_signal(reg, kFwd);
  auto ack = ack_of(kFwd);
  CHECK(mark_reverse(reg, ack));
  CHECK(ack.flags.has(TcpFlag::Ece));
  CHECK(reg.cell(idx) == 1);

  // A data segment of the reverse flow carries ACK too and is marked.
  auto data = ack_of(kFwd);
  data.size = 1500;
  CHECK(mark_reverse(reg, data));
  CHECK(reg.cell(idx) == 0);

  // No ACK flag: passes through without consuming.
  on_congestion_signal(reg, kFwd);
  Packet syn;
  syn.key = kFwd.swapped();
  syn.flags = TcpFlags{TcpFlag::Syn};
  CHECK_FALSE(mark_reverse(reg, syn));
  CHECK(reg.cell(idx) == 1);
}

TEST_CASE("forward marking") {
  Packet p;
  p.ecn = Ecn::Ect0;
  CHECK(forward_mark(p) == ForwardMarkResult::Marked);
  CHECK(p.ecn == Ecn::Ce);
  CHECK(forward_mark(p) == ForwardMarkResult::AlreadyCe);
  CHECK(p.ecn == Ecn::Ce);
  Packet plain;
  CHECK(forward_mark(plain) == ForwardMarkResult::Dropped);
  Packet ect1;
  ect1.ecn = Ecn::Ect1;
  CHECK(forward_mark(ect1) == ForwardMarkResult::Marked);
}

TEST_CASE("per-port aggregation") {
  const FlowKey other{0x0A000002, 0x0A00000C, kProtoTcp, 10002, 5001};
  SUBCASE("one signal, first reverse ACK of either flow") {
    CongestionStateRegister reg(4);
    per_port_signal(reg, 2);
    auto a = ack_of(other);
    auto b = ack_of(kFwd);
    CHECK(per_port_mark(reg, 2, a));
    CHECK_FALSE(per_port_mark(reg, 2, b));
  }
  SUBCASE("no signals") {
    CongestionStateRegister reg(4);
    auto a = ack_of(kFwd);
    CHECK_FALSE(per_port_mark(reg, 2, a));
  }
  SUBCASE("two signals, three interleaved ACKs") {
    CongestionStateRegister reg(4);
    per_port_signal(reg, 1);
    per_port_signal(reg, 1);
    int marked = 0;
    for (const auto& k : {kFwd, other, kFwd}) {
      auto p = ack_of(k);
      marked += per_port_mark(reg, 1, p);
    }
    CHECK(marked == 2);
  }
}

TEST_CASE("randomized conservation with collision-free keys") {
  std::mt19937_64 rng(5);
  CongestionStateRegister reg(1U << 16, 255);
  std::vector<FlowKey> flows;
  std::unordered_set<std::uint32_t> used;
  while (flows.size() < 64) {
    FlowKey k{static_cast<IpAddress>(rng()), static_cast<IpAddress>(rng()), kProtoTcp,
              static_cast<PortNumber>(rng()), 5001};
    if (used.insert(flow_hash(k, reg.size())).second) flows.push_back(k);
  }
  std::vector<std::uint64_t> pending(flows.size()), marks(flows.size()), expect(flows.size());
  for (int i = 0; i < 100'000; ++i) {
    const auto f = rng() % flows.size();
    if (rng() % 2) {
      if (reg.increment(flow_hash(flows[f], reg.size()))) ++pending[f];
    } else {
      auto a = ack_of(flows[f]);
      if (mark_reverse(reg, a)) ++marks[f];
      if (pending[f] > 0) {
        --pending[f];
        ++expect[f];
      }
    }
    REQUIRE(reg.cell(flow_hash(flows[f], reg.size())) <= reg.counter_max());
  }
  CHECK(marks == expect);
}
