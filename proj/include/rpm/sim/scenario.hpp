#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpm/core/packet.hpp"
#include "rpm/core/sim_time.hpp"
#include "rpm/transport/congestion.hpp"

namespace rpm::sim {

enum class NodeKind { Host, Switch };

enum class AqmMode { None, Fwd, RpmPerFlow, RpmPerPort };

struct NodeSpec {
  std::string name;
  NodeKind kind = NodeKind::Host;
};

/// Full-duplex link; both directions share capacity and delay.
struct LinkSpec {
  std::string a;
  std::string b;
  std::uint64_t capacity_bps = 0;
  SimTime delay;
};

struct FlowSpec {
  std::string src;
  std::string dst;
  std::optional<std::uint64_t> size_mss;  // unset: long-lived
  SimTime start;
  transport::Transport transport = transport::Transport::TcpAimd;
  std::optional<PortNumber> src_port;
  std::optional<PortNumber> dst_port;
};

/// Static next-hop override: at `node`, traffic for `dst` leaves towards `via`.
struct RouteSpec {
  std::string node;
  std::string dst;
  std::string via;
};

struct AqmSpec {
  AqmMode mode = AqmMode::None;
  std::string node;                   // switch running CoDel (+ RPM)
  std::optional<std::string> port;    // neighbour name; unset: every egress port
  SimTime target = SimTime::from_ms(1);
  SimTime interval = SimTime::from_ms(20);
  std::uint32_t register_size = 1U << 16;
  std::uint32_t counter_max = 255;
};

struct ScenarioConfig {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  std::vector<FlowSpec> flows;
  std::vector<RouteSpec> routes;
  AqmSpec aqm;

  /// Switch egress buffer. Unset: the byte budget of kDefaultQueueDelay at the
  /// slowest link adjacent to the AQM switch (slowest link overall when no AQM).
  std::optional<std::uint64_t> buffer_bytes;
  std::uint64_t host_buffer_bytes = 64ULL << 20;
  SimTime duration = SimTime::from_ms(10'000);
  std::uint64_t seed = 1;
  std::uint32_t mss = kDefaultMss;
  SimTime sample_interval = SimTime::from_ms(10);
  /// Each flow start is delayed by a uniform draw from [0, start_jitter).
  SimTime start_jitter;

  /// Throws ConfigError on any violated constraint.
  void validate() const;
};

inline constexpr SimTime kDefaultQueueDelay = SimTime::from_us(1'999);

/// Buffer used for switch ports when ScenarioConfig::buffer_bytes is unset.
std::uint64_t default_buffer_bytes(const ScenarioConfig& cfg);

ScenarioConfig parse_scenario(std::string_view json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string dump_scenario(const ScenarioConfig& cfg);

std::string_view to_string(AqmMode mode);
AqmMode parse_aqm_mode(std::string_view s);
std::string_view to_string(transport::Transport t);
transport::Transport parse_transport(std::string_view s);

}  // namespace rpm::sim
