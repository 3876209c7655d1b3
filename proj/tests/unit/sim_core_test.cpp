#include <doctest.h>

#include <sstream>

#include "rpm/core/errors.hpp"
#include "rpm/sim/network.hpp"
#include "rpm/sim/simulator.hpp"
#include "rpm/sim/testbed.hpp"

using namespace rpm;
using namespace rpm::sim;

namespace {

Packet sized(std::uint32_t bytes) {
  Packet p;
  p.size = bytes;
  return p;
}

ScenarioConfig two_hosts_one_switch() {
  ScenarioConfig c;
  c.nodes = {{"H1", NodeKind::Host}, {"S", NodeKind::Switch}, {"H2", NodeKind::Host}};
  c.links = {{"H1", "S", 10'000'000, SimTime::from_ms(1)}, {"S", "H2", 10'000'000, SimTime::from_ms(1)}};
  c.duration = SimTime::from_ms(1000);
  return c;
}

std::string csv_of(const SimTrace& t) {
  std::ostringstream os;
  write_trace_csv(os, t);
  write_flow_summary_csv(os, t);
  return os.str();
}

}  // namespace

TEST_CASE("serialization time rounds up to whole nanoseconds") {
  Link l{10'000'000, SimTime{}};
  CHECK(l.serialization_time(1500) == SimTime::from_us(1200));
  Link odd{3, SimTime{}};
  CHECK(odd.serialization_time(1).ns() == 2'666'666'667);
  Link fast{1'000'000'000'000ULL, SimTime{}};
  CHECK(fast.serialization_time(40).ns() == 1);
}

TEST_CASE("enqueue honours the byte limit") {
  OutputQueue q(100'000);
  CHECK(q.enqueue(sized(1500), SimTime{}) == EnqueueResult::Accepted);

  OutputQueue full(3000);
  REQUIRE(full.enqueue(sized(1500), SimTime{}) == EnqueueResult::Accepted);
  REQUIRE(full.enqueue(sized(1500), SimTime{}) == EnqueueResult::Accepted);
  CHECK(full.occupancy() == full.buffer_limit());
  CHECK(full.enqueue(sized(40), SimTime{}) == EnqueueResult::TailDropped);
  CHECK(full.drops() == 1);

  OutputQueue almost(10'000);
  REQUIRE(almost.enqueue(sized(1500 * 6), SimTime{}) == EnqueueResult::Accepted);
  REQUIRE(almost.occupancy() == almost.buffer_limit() - 1000);
  CHECK(almost.enqueue(sized(1500), SimTime{}) == EnqueueResult::TailDropped);
  CHECK(almost.occupancy() == 9000);
}

TEST_CASE("dequeue reports per-hop sojourn") {
  OutputQueue q(100'000);
  q.enqueue(sized(1500), SimTime{});
  CHECK(q.dequeue(SimTime::from_ms(1)).sojourn == SimTime::from_ms(1));

  // Back to back on 10 Mbps: the second waits one serialization time.
  const Link l{10'000'000, SimTime{}};
  q.enqueue(sized(1500), SimTime{});
  q.enqueue(sized(1500), SimTime{});
  const auto first = q.dequeue(SimTime{});
  const auto second = q.dequeue(l.serialization_time(first.packet.size));
  CHECK(first.sojourn == SimTime{});
  CHECK(second.sojourn == SimTime::from_us(1200));
  CHECK(q.occupancy() == 0);

  q.enqueue(sized(100), SimTime::from_ms(7));
  CHECK(q.dequeue(SimTime::from_ms(7)).sojourn == SimTime{});
  CHECK_THROWS_AS(q.dequeue(SimTime::from_ms(8)), ContractViolation);
}

TEST_CASE("build_topology") {
  SUBCASE("default dumbbell") {
    const auto net = build_topology(make_dumbbell({}));
    CHECK(net.nodes().size() == 23);
    CHECK(net.link_count() == 22);
    const auto r1 = net.find("R1");
    REQUIRE(r1);
    CHECK(net.aqm_node() == r1);
  }
  SUBCASE("no nodes") {
    ScenarioConfig c;
    CHECK_THROWS_WITH_AS(build_topology(c), doctest::Contains("no nodes"), ConfigError);
  }
  SUBCASE("two hosts one switch") {
    const auto net = build_topology(two_hosts_one_switch());
    CHECK(net.nodes().size() == 3);
    CHECK(net.link_count() == 2);
  }
  SUBCASE("dangling reference") {
    auto c = two_hosts_one_switch();
    c.links.push_back({"S", "H9", 1000, SimTime{}});
    CHECK_THROWS_AS(build_topology(c), ConfigError);
  }
  SUBCASE("zero capacity") {
    auto c = two_hosts_one_switch();
    c.links[0].capacity_bps = 0;
    CHECK_THROWS_AS(build_topology(c), ConfigError);
  }
  SUBCASE("register size must be a power of two") {
    auto c = two_hosts_one_switch();
    c.aqm.mode = AqmMode::RpmPerFlow;
    c.aqm.node = "S";
    c.aqm.register_size = 1000;
    CHECK_THROWS_AS(build_topology(c), ConfigError);
  }
}

TEST_CASE("scenario JSON round trip") {
  auto c = make_dumbbell({});
  c.flows[3].size_mss = 42;
  const auto text = dump_scenario(c);
  CHECK(dump_scenario(parse_scenario(text)) == text);
  CHECK_THROWS_AS(parse_scenario("{not json"), ConfigError);
}

TEST_CASE("run with no flows produces an empty trace") {
  const auto t = run(build_topology(two_hosts_one_switch()), SimTime::from_ms(100));
  CHECK(t.events_dispatched == 0);
  CHECK(t.events.empty());
  CHECK(t.flows.empty());
  CHECK_THROWS_AS(run(build_topology(two_hosts_one_switch()), SimTime{}), ConfigError);
}

TEST_CASE("one 10-MSS flow on an idle path completes in closed form") {
  auto c = two_hosts_one_switch();
  FlowSpec f;
  f.src = "H1";
  f.dst = "H2";
  f.size_mss = 10;
  c.flows = {f};
  const auto t = simulate(c);
  REQUIRE(t.flows.size() == 1);
  REQUIRE(t.flows[0].fct());
  // SYN and SYN-ACK: 2 x (2 hops x 32 us + 2 ms). Ten 1500 B segments: the last
  // leaves H1 at 12 ms and needs one more 1.2 ms hop plus 2 ms propagation.
  // The final ACK returns in 2 x 32 us + 2 ms.
  const auto handshake = SimTime::from_us(2 * (64 + 2000));
  const auto data = SimTime::from_us(12'000 + 1'200 + 2'000);
  const auto ack = SimTime::from_us(64 + 2'000);
  CHECK(*t.flows[0].fct() == handshake + data + ack);
  CHECK(t.flows[0].bytes_delivered == 10 * kDefaultMss);
  CHECK(t.events.empty());
}

TEST_CASE("same seed gives identical traces, different seed does not") {
  DumbbellOptions o;
  o.scale = 0.01;
  o.mode = AqmMode::RpmPerFlow;
  o.duration = SimTime::from_ms(2000);
  o.buffer_bytes = 150'000;
  const auto a = csv_of(simulate(make_dumbbell(o)));
  const auto b = csv_of(simulate(make_dumbbell(o)));
  CHECK(a == b);
  o.seed = 2;
  CHECK(csv_of(simulate(make_dumbbell(o))) != a);
}

TEST_CASE("per-flow packet conservation and queue bounds") {
  for (auto mode : {AqmMode::Fwd, AqmMode::RpmPerFlow, AqmMode::RpmPerPort}) {
    DumbbellOptions o;
    o.mode = mode;
    o.duration = SimTime::from_ms(3000);
    o.receiver_delays = fairness_receiver_delays(2);
    const auto cfg = make_dumbbell(o);  // default buffer: heavy tail dropping
    const auto t = simulate(cfg);
    for (const auto& f : t.flows) {
      CHECK(f.packets_delivered + f.packets_dropped + f.packets_in_flight == f.packets_sent);
    }
    const auto limit = default_buffer_bytes(cfg);
    std::size_t sampled = 0;
    for (const auto& s : t.occupancy) {
      if (t.ports.at(s.port).aqm) {
        CHECK(s.bytes <= limit);
        ++sampled;
      }
    }
    CHECK(sampled > 0);
    // Dispatch order is reflected in the event log.
    for (std::size_t i = 1; i < t.events.size(); ++i) CHECK(t.events[i - 1].t <= t.events[i].t);
  }
}

TEST_CASE("path symmetry") {
  SUBCASE("dumbbell pairs") {
    const auto net = build_topology(make_dumbbell({}));
    const auto r1 = *net.find("R1");
    for (NodeId i = 1; i <= 10; ++i) {
      const auto a = *net.find("H" + std::to_string(i));
      const auto b = *net.find("H" + std::to_string(i + 10));
      const FlowKey k{net.node(a).ip, net.node(b).ip, kProtoTcp, 10000, 5001};
      CHECK(check_path_symmetry(net, k, r1));
    }
  }
  SUBCASE("return path bypasses the switch") {
    ScenarioConfig c;
    c.nodes = {{"H1", NodeKind::Host}, {"A", NodeKind::Switch}, {"B", NodeKind::Switch},
               {"C", NodeKind::Switch}, {"H2", NodeKind::Host}};
    const auto ms = SimTime::from_ms(1);
    c.links = {{"H1", "A", 1'000'000, ms}, {"A", "B", 1'000'000, ms}, {"B", "C", 1'000'000, ms},
               {"C", "H2", 1'000'000, ms}, {"A", "C", 1'000'000, ms}};
    c.routes = {{"A", "H2", "B"}};
    const auto net = build_topology(c);
    const FlowKey k{net.node(*net.find("H1")).ip, net.node(*net.find("H2")).ip, kProtoTcp, 1, 2};
    CHECK_FALSE(check_path_symmetry(net, k, *net.find("B")));
    CHECK(check_path_symmetry(net, k, *net.find("A")));
  }
  SUBCASE("single link") {
    ScenarioConfig c;
    c.nodes = {{"H1", NodeKind::Host}, {"H2", NodeKind::Host}};
    c.links = {{"H1", "H2", 1'000'000, SimTime{}}};
    const auto net = build_topology(c);
    const FlowKey k{net.node(0).ip, net.node(1).ip, kProtoTcp, 1, 2};
    CHECK(check_path_symmetry(net, k, 0));
  }
}
